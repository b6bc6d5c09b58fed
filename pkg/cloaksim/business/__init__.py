"""Package for all business logic.

"""
