# -*- coding: utf-8 -*-
from __future__ import print_function
import re
import inspect
import os
import shutil

from isoland import callbacks
from isoland import complexity
from isoland import config
from isoland import correlators
from isoland import fields
from isoland import geometry
from isoland import hessian
from isoland import kacrice
from isoland import optimizers
from isoland import rmt

MODULES = [(correlators, 'isoland.correlators'),
           (geometry, 'isoland.geometry'),
           (rmt, 'isoland.rmt'),
           (complexity, 'isoland.complexity'),
           (optimizers, 'isoland.optimizers'),
           (hessian, 'isoland.hessian'),
           (fields, 'isoland.fields'),
           (kacrice, 'isoland.kacrice'),
           (callbacks, 'isoland.callbacks'),
           (config, 'isoland.config')]

SKIP = ['CallbackList', 'get', 'from_config']
INCLUDE_METHODS_FOR = [
    'Correlator',
    'Callback',
    'RunConfig',
    'FieldSample',
    'ConditionalHessianModel',
]


def get_signature(obj, name):
    try:
        signature = str(inspect.signature(obj))
    except (TypeError, ValueError):
        signature = '()'
    signature = signature.replace('(self, ', '(').replace('(self)', '()')
    return name + signature


def code_snippet(snippet):
    result = '```python\n'
    result += snippet + '\n'
    result += '```\n'
    return result


def process_docstring(docstring):
    docstring = inspect.cleandoc(docstring) + '\n'
    docstring = re.sub(r'# (.*)\n',
                       r'__\1__\n\n',
                       docstring)
    docstring = re.sub(r'    ([^\s\\]+):(.*)\n',
                       r'- __\1__:\2\n',
                       docstring)
    return docstring


def member_page(obj, module_name):
    blocks = ['### ' + obj.__name__ + '\n']
    blocks.append(code_snippet(get_signature(obj, module_name + '.' + obj.__name__)))
    if obj.__doc__:
        blocks.append(process_docstring(obj.__doc__))
    if inspect.isclass(obj) and obj.__name__ in INCLUDE_METHODS_FOR:
        methods = [m for name, m in sorted(vars(obj).items())
                   if not name.startswith('_') and inspect.isfunction(m)]
        if methods:
            blocks.append('#### Methods\n')
        for method in methods:
            blocks.append(code_snippet(get_signature(method, method.__name__)))
            if method.__doc__:
                blocks.append(process_docstring(method.__doc__))
    return '\n'.join(blocks)


print('Cleaning up existing sources directory.')
if os.path.exists('sources'):
    shutil.rmtree('sources')
print('Populating sources directory with templates.')
for subdir, dirs, fnames in os.walk('templates'):
    for fname in fnames:
        new_subdir = subdir.replace('templates', 'sources')
        if not os.path.exists(new_subdir):
            os.makedirs(new_subdir)
        if fname[-3:] == '.md':
            fpath = os.path.join(subdir, fname)
            new_fpath = fpath.replace('templates', 'sources')
            shutil.copy(fpath, new_fpath)

print('Starting autogeneration.')
for module, module_name in MODULES:
    pages = []
    for name in dir(module):
        if name in SKIP or name[0] == '_':
            continue
        member = getattr(module, name)
        if not (inspect.isclass(member) or inspect.isfunction(member)):
            continue
        if member.__module__ != module_name or member.__name__ != name:
            # aliases are documented under their class name
            continue
        line = inspect.getsourcelines(member)[-1]
        pages.append((line, member_page(member, module_name)))

    pages.sort(key=lambda x: x[0])
    module_page = '\n----\n\n'.join(x[1] for x in pages)

    path = 'sources/' + module_name.split('.')[-1] + '.md'
    if os.path.exists(path):
        with open(path) as f:
            template = f.read()
        assert '{{autogenerated}}' in template, ('Template found for ' + path +
                                                 ' but missing {{autogenerated}} tag.')
        module_page = template.replace('{{autogenerated}}', module_page)
        print('...inserting autogenerated content into template:', path)
    else:
        print('...creating new page with autogenerated content:', path)
    with open(path, 'w') as f:
        f.write(module_page)
