""" fusionforge/lib/__init__.py """
