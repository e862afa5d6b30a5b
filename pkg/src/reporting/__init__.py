# reporting package
__all__ = ['report', 'tables']
