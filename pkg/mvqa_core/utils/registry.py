def _register_generic(module_dict, module_name, module):
    if module_name in module_dict:
        raise KeyError("'{}' is already registered in {}".format(module_name, module_dict.name))
    module_dict[module_name] = module


class Registry(dict):
    '''
    A named dictionary of interchangeable components (question families,
    endpoint providers, placement kinds).

    Register with a call:
        QUESTION_FAMILIES.register("object_direction", ObjectDirectionFamily)
    or as a decorator:
        @ENDPOINT_PROVIDERS.register("mock")
        class MockProvider(object):
            ...

    Lookups of unknown names raise a KeyError listing what is available.
    '''
    def __init__(self, name="registry", *args, **kwargs):
        super(Registry, self).__init__(*args, **kwargs)
        self.name = name

    def register(self, module_name, module=None):
        if module is not None:
            _register_generic(self, module_name, module)
            return module

        def register_fn(fn):
            _register_generic(self, module_name, fn)
            return fn

        return register_fn

    def __missing__(self, key):
        raise KeyError(
            "'{}' is not registered in {}; available: {}".format(
                key, self.name, ", ".join(sorted(self.keys()))
            )
        )
