from __future__ import absolute_import
import csv
import json
import sys
import numpy as np
import six

from .generic_utils import get_json_type


def result_payload(command, config, rows, summary=None):
    '''Everything a result file carries: the resolved config and the
    library version are always embedded.'''
    from .. import __version__
    return {'command': command,
            'version': __version__,
            'config': config.get_config() if hasattr(config, 'get_config') else config,
            'summary': summary or {},
            'rows': list(rows)}


def to_json_string(payload):
    return json.dumps(payload, default=get_json_type, indent=2, sort_keys=True) + '\n'


def _cell(value):
    if value is None:
        return ''
    if isinstance(value, (np.generic, np.ndarray)):
        value = get_json_type(value)
    if isinstance(value, (dict, list, tuple)):
        return json.dumps(value, default=get_json_type, sort_keys=True)
    return repr(value) if isinstance(value, float) else str(value)


def to_csv_string(payload):
    '''Flat rows with two leading comment lines (version, config).'''
    out = six.StringIO()
    out.write('# isoland %s %s\n' % (payload['version'], payload['command']))
    out.write('# config: %s\n' % json.dumps(payload['config'], default=get_json_type,
                                            sort_keys=True))
    rows = payload['rows']
    columns = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(k)) for k in columns])
    return out.getvalue()


def write_result(payload, path=None, fmt='json'):
    '''Write a payload to `path` (stdout when None) as JSON or CSV.'''
    if fmt == 'json':
        text = to_json_string(payload)
    elif fmt == 'csv':
        text = to_csv_string(payload)
    else:
        raise Exception('Unknown output format: ' + str(fmt))
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, 'w') as f:
            f.write(text)
    return text
