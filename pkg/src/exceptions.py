class SecrecyException(Exception):
    pass


class ParameterException(SecrecyException):
    '''Input values outside their documented ranges'''
    pass


class ConfigException(SecrecyException):
    '''Unknown or unparseable configuration'''
    pass


class SolverException(SecrecyException):
    '''Numerical failure; diagnostics carries whatever the caller needs to reproduce it'''

    def __init__(self, message: str, diagnostics: dict = None):
        super().__init__(message)
        self.diagnostics = diagnostics if diagnostics is not None else {}
