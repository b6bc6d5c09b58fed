"""Top-level package of the acoustic cloaking workbench.

"""
