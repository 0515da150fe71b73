# modules/__init__.py
# Morext workbench: exact algebras, extension classes and Morita transport
