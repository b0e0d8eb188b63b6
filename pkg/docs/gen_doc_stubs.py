"""Mkdocs Code Reference Generator."""

from pathlib import Path

import mkdocs_gen_files

src_root = Path(".")

for path in src_root.glob("packages/*/pyproject.toml"):
    project_path = str(path.parent)
    custom_patterns = [
        # Markdowns
        f"{project_path}/*.md",
        f"{project_path}/**/*.md",

        # Images
        f"{project_path}/**/*.jpg",
        f"{project_path}/**/*.png"
    ]

    for pattern in custom_patterns:
        for path in src_root.glob(pattern):
            if "tests" in path.parts:
                continue
            doc_path = Path("reference", path.relative_to(src_root))
            with mkdocs_gen_files.open(doc_path, "wb") as f:
                f.write(path.read_bytes())

            if not path.suffix.endswith(".jpg") and not path.suffix.endswith(".png"):
                mkdocs_gen_files.set_edit_path(doc_path, f"../{path}")
