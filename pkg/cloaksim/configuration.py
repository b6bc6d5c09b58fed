"""Module for loading, validating, and accessing the workbench's
configuration.

A configuration document is assembled from the configuration file (if
any), an optional preset and the command-line overrides, validated and
normalized with Cerberus, and finally turned into an immutable
RunConfig.

"""
import copy
import dataclasses
import enum
import logging
import math
import pathlib
import typing

import cerberus  # type: ignore
import dotenv
import marshmallow
import marshmallow.fields
import pyaml_env  # type: ignore
import yaml

from cloaksim.entities import CavityCondition
from cloaksim.entities import ScatterMode
from cloaksim.exceptions import CloakSimError
from cloaksim.geometry import GeometrySpec
from cloaksim.geometry import Shape
from cloaksim.geometry import ShapeKind
from cloaksim.logging import LogFormat
from cloaksim.scatter import PmlConfig

_logger = logging.getLogger(__name__)

_DEFAULT_FILE_NAME: typing.Final[str] = 'cloaksim-config.yml'
"""Default configuration file name."""

Document = typing.Dict[str, typing.Any]


class ConfigError(CloakSimError):
    """Exception class for all configuration errors.

    """
    pass


class Config:
    """Class for loading and accessing a configuration document.

    """
    def __init__(self, default_file_name: str):
        """Construct a configuration instance.

        Parameters
        ----------
        default_file_name : str
            The name of the configuration file searched for if no
            explicit path is given.

        """
        self.default_file_name = default_file_name
        self.file_path: typing.Optional[pathlib.Path] = None
        self.__document: typing.Optional[Document] = None

    def __getitem__(self, key: str) -> typing.Any:
        if self.__document is None:
            raise ConfigError('configuration not yet loaded')
        return self.__document[key]

    def is_loaded(self) -> bool:
        """Determine if a configuration has been loaded.

        """
        return self.__document is not None

    @property
    def document(self) -> Document:
        if self.__document is None:
            raise ConfigError('configuration not yet loaded')
        return copy.deepcopy(self.__document)

    def load(self, validation_schema: Document,
             file_path: typing.Optional[str] = None,
             patches: typing.Sequence[Document] = ()) -> None:
        """Load, patch, and validate a configuration document.

        Parameters
        ----------
        validation_schema : dict
            The Cerberus schema the document is validated against.
        file_path : str or None
            The path to the configuration file (typical locations are
            searched if None; the schema defaults are used if no file
            is found).
        patches : sequence of dict
            Partial documents deeply merged over the file contents (in
            order) before validation.

        Raises
        ------
        ConfigError
            If the file cannot be read or the patched document is
            invalid.

        """
        path = self.__find_file(file_path)
        document: Document = {}
        if path is not None:
            document = self.__parse_file(path)
        for patch in patches:
            document = merge_documents(document, patch)
        self.__document = validate_document(validation_schema, document)
        self.file_path = path
        _logger.info('configuration loaded', extra={'file_path': path})

    def __find_file(
            self,
            file_path: typing.Optional[str]) -> typing.Optional[pathlib.Path]:
        if file_path is not None:
            path = pathlib.Path(file_path)
            if not path.is_file():
                raise ConfigError('configuration file not found',
                                  file_path=file_path)
            return path
        for directory in (pathlib.Path.cwd(),
                          pathlib.Path.home() / '.config' / 'cloaksim'):
            path = directory / self.default_file_name
            if path.is_file():
                return path
        return None

    def __parse_file(self, path: pathlib.Path) -> Document:
        env_path = path.parent / '.env'
        if env_path.is_file():
            dotenv.load_dotenv(env_path)
        else:
            dotenv.load_dotenv()
        try:
            document = pyaml_env.parse_config(str(path))
        except (OSError, yaml.YAMLError):
            raise ConfigError('unable to parse the configuration file',
                              file_path=str(path))
        if document is None:
            return {}
        if not isinstance(document, dict):
            raise ConfigError('configuration file must contain a mapping',
                              file_path=str(path))
        return document


def merge_documents(base: Document, patch: Document) -> Document:
    """Deeply merge a partial document over a base document (patch
    values win; nested mappings are merged, everything else replaced; shape
    entries are replaced as a whole).

    """
    merged = copy.deepcopy(base)
    for key, value in patch.items():
        if (isinstance(value, dict) and isinstance(merged.get(key), dict)
                and 'shape' not in value):
            merged[key] = merge_documents(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


class _Validator(cerberus.Validator):
    def _normalize_coerce_to_float(self, value: typing.Any) -> typing.Any:
        if value is None or isinstance(value, bool):
            return value
        return float(value)


def validate_document(validation_schema: Document,
                      document: Document) -> Document:
    """Validate a configuration document and expand its defaults.

    Raises
    ------
    ConfigError
        If the document is invalid (the Cerberus errors are attached).

    """
    validator = _Validator(validation_schema)
    if not validator.validate(document):
        raise ConfigError('invalid configuration', errors=validator.errors)
    return validator.document


def _number(default: typing.Optional[float], nullable: bool = False,
            **rules: typing.Any) -> Document:
    # YAML reads exponent literals without a dot (1e-8) as strings
    rule = {
        'type': 'float',
        'coerce': 'to_float',
        'nullable': nullable,
        'default': default
    }
    rule.update(rules)
    return rule


def _integer(default: typing.Optional[int], nullable: bool = False,
             **rules: typing.Any) -> Document:
    rule = {'type': 'integer', 'nullable': nullable, 'default': default}
    rule.update(rules)
    return rule


_VALIDATION_SCHEMA_SHAPE = {
    'type': 'dict',
    'schema': {
        'shape': {
            'type': 'string',
            'required': True,
            'allowed': [kind.value for kind in ShapeKind]
        },
        'a': {
            'type': 'float',
            'coerce': 'to_float',
            'required': True,
            'min': 0.0
        },
        'b': _number(None, nullable=True, min=0.0)
    }
}
"""Schema for validating a shape entry in the configuration file."""

_VALIDATION_SCHEMA_LOG = {
    'type': 'dict',
    'default': {},
    'schema': {
        'format': {
            'type': 'string',
            'allowed': [log_format.name.lower() for log_format in LogFormat],
            'default': LogFormat.HUMAN_READABLE.name.lower()
        },
        'console': {
            'type': 'dict',
            'default': {},
            'schema': {
                'enabled': {
                    'type': 'boolean',
                    'default': True
                }
            }
        },
        'file': {
            'type': 'dict',
            'default': {},
            'schema': {
                'enabled': {
                    'type': 'boolean',
                    'default': False
                },
                'name': {
                    'type': 'string',
                    'empty': False,
                    'default': 'cloaksim.log'
                },
                'max_bytes': _integer(104857600, min=0),
                'backup_count': _integer(10, min=0)
            }
        }
    }
}
"""Schema for validating the log entry in the configuration file."""

_VALIDATION_SCHEMA = {
    'application': {
        'type': 'dict',
        'default': {},
        'schema': {
            'debug': {
                'type': 'boolean',
                'default': False
            },
            'log': _VALIDATION_SCHEMA_LOG
        }
    },
    'geometry': {
        'type': 'dict',
        'default': {},
        'schema': {
            'outer': dict(_VALIDATION_SCHEMA_SHAPE,
                          default={
                              'shape': 'circle',
                              'a': 1.0
                          }),
            'cavity': dict(_VALIDATION_SCHEMA_SHAPE,
                           default={
                               'shape': 'circle',
                               'a': 0.5
                           }),
            'core': dict(_VALIDATION_SCHEMA_SHAPE, nullable=True,
                         default=None),
            'box_halfwidth': _number(2.2, min=0.0),
            'pml_thickness': _number(0.6, min=0.0)
        }
    },
    'mesh': {
        'type': 'dict',
        'default': {},
        'schema': {
            'h': _number(0.1, min=0.0),
            'degree': _integer(1, allowed=[1, 2])
        }
    },
    'ite': {
        'type': 'dict',
        'default': {},
        'schema': {
            'n_c': _number(16.0, min=0.0),
            'cavity_bc': {
                'type': 'string',
                'allowed': [condition.value for condition in CavityCondition],
                'default': CavityCondition.DIRICHLET.value
            },
            'selection': {
                'type': 'string',
                'allowed': ['nearest', 'smallest'],
                'default': 'nearest'
            },
            'shift': _number(1.0),
            'shift_imag': _number(0.0),
            'count': _integer(5, min=1),
            'dump_eigenfunctions': {
                'type': 'boolean',
                'default': False
            },
            'dump_matrices': {
                'type': 'boolean',
                'default': False
            }
        }
    },
    'herglotz': {
        'type': 'dict',
        'default': {},
        'schema': {
            'directions': _integer(64, min=4),
            'points': _integer(None, nullable=True, min=1),
            'regularizer': _number(1e-8, min=0.0),
            'curve': {
                'type': 'string',
                'allowed': ['outer', 'cavity', 'circle'],
                'default': 'outer'
            },
            'curve_radius': _number(None, nullable=True, min=0.0),
            'residual_threshold': _number(1e-2, min=0.0)
        }
    },
    'scatter': {
        'type': 'dict',
        'default': {},
        'schema': {
            'modes': {
                'type': 'list',
                'schema': {
                    'type': 'string',
                    'allowed': [mode.value for mode in ScatterMode]
                },
                'default': [ScatterMode.IDEALIZED_DIRICHLET.value]
            },
            'kappa': _number(None, nullable=True, min=0.0),
            'gamma': _number(1.0, min=0.0),
            'tau': _number(0.01, min=0.0),
            'alpha': _number(1.0, min=0.0),
            'beta': _number(0.3, min=0.0),
            'sigma_core': _number(1.0, min=0.0),
            'n_core': _number(12.0, min=0.0),
            'cavity_sigma': _number(None, nullable=True, min=0.0),
            'cavity_n': _number(None, nullable=True, min=0.0),
            'evaluation_radius': _number(1.8, min=0.0),
            'ratio_points': _integer(720, min=8),
            'grid_points': _integer(81, min=2)
        }
    },
    'pml': {
        'type': 'dict',
        'default': {},
        'schema': {
            'exponent': _integer(3, min=0),
            'reflection': _number(math.exp(-16.0), min=0.0, max=1.0)
        }
    },
    'sweep': {
        'type': 'dict',
        'default': {},
        'schema': {
            'axis': {
                'type': 'string',
                'allowed': ['h', 'tau', 'n_a', 'r', 'M'],
                'default': 'h'
            },
            'values': {
                'type': 'list',
                'schema': {
                    'type': 'float',
                    'coerce': 'to_float'
                },
                'default': []
            },
            'pipeline': {
                'type': 'string',
                'allowed': ['ite', 'cloak'],
                'nullable': True,
                'default': None
            },
            'number_workers': _integer(4, min=1)
        }
    },
    'output': {
        'type': 'dict',
        'default': {},
        'schema': {
            'directory': {
                'type': 'string',
                'empty': False,
                'default': 'output'
            }
        }
    }
}
"""Schema for validating the configuration file."""

_CIRCLE = {
    'outer': {
        'shape': 'circle',
        'a': 1.0
    },
    'cavity': {
        'shape': 'circle',
        'a': 0.5
    }
}

_ELLIPSE = {
    'outer': {
        'shape': 'ellipse',
        'a': 1.0,
        'b': 1.2
    },
    'cavity': {
        'shape': 'ellipse',
        'a': 0.5,
        'b': 0.6
    }
}

_SQUARE = {
    'outer': {
        'shape': 'square',
        'a': 1.0
    },
    'cavity': {
        'shape': 'square',
        'a': 0.5
    }
}

_CIRCLE_CORE = {'shape': 'circle', 'a': 0.3}

_ELLIPSE_CORE = {'shape': 'ellipse', 'a': 0.3, 'b': 0.36}


def _ite_preset(geometry: Document, cavity_bc: str, selection: str,
                count: int, shift: float = 1.0,
                h: typing.Optional[float] = None) -> Document:
    preset: Document = {
        'geometry': geometry,
        'ite': {
            'cavity_bc': cavity_bc,
            'selection': selection,
            'shift': shift,
            'count': count
        }
    }
    if h is not None:
        preset['mesh'] = {'h': h}
    return preset


def _cloak_preset(geometry: Document, mode: ScatterMode, kappa: float,
                  core: typing.Optional[Document] = None) -> Document:
    cavity_condition = mode.cavity_condition
    assert cavity_condition is not None
    return {
        'geometry': dict(geometry, core=core),
        'mesh': {
            'h': 0.1
        },
        'ite': {
            'cavity_bc': cavity_condition.value,
            'selection': 'nearest',
            'shift': kappa
        },
        'scatter': {
            'modes': [mode.value],
            'kappa': kappa
        }
    }


PRESETS: typing.Final[typing.Dict[str, Document]] = {
    'table1': _ite_preset(_CIRCLE, 'dirichlet', 'nearest', 5, shift=1.0),
    'table2': _ite_preset(_CIRCLE, 'dirichlet', 'nearest', 2, shift=2.5),
    'table3': _ite_preset(_CIRCLE, 'neumann', 'smallest', 5),
    'table4': _ite_preset(_ELLIPSE, 'dirichlet', 'nearest', 6, shift=2.0,
                          h=0.1),
    'table5': _ite_preset(_SQUARE, 'dirichlet', 'nearest', 6, shift=2.0,
                          h=0.1),
    'fig1': _cloak_preset(_CIRCLE, ScatterMode.IDEALIZED_DIRICHLET, 0.354349),
    'fig2': _cloak_preset(_CIRCLE, ScatterMode.IDEALIZED_DIRICHLET, 3.028932),
    'fig3': _cloak_preset(_CIRCLE, ScatterMode.IDEALIZED_DIRICHLET, 3.857263),
    'fig4': _cloak_preset(_CIRCLE, ScatterMode.IDEALIZED_NEUMANN, 1.890939),
    'fig5': _cloak_preset(_ELLIPSE, ScatterMode.IDEALIZED_DIRICHLET,
                          2.097681),
    'fig6': _cloak_preset(_ELLIPSE, ScatterMode.IDEALIZED_NEUMANN, 1.747153),
    'fig7': _cloak_preset(_SQUARE, ScatterMode.IDEALIZED_DIRICHLET, 2.431338),
    'fig8': _cloak_preset(_SQUARE, ScatterMode.IDEALIZED_NEUMANN, 0.761138),
    'fig9': _cloak_preset(_CIRCLE, ScatterMode.LOSSY1, 3.857263,
                          core=_CIRCLE_CORE),
    'fig10': _cloak_preset(_CIRCLE, ScatterMode.LOSSY2, 1.890939,
                           core=_CIRCLE_CORE),
    'fig11': _cloak_preset(_ELLIPSE, ScatterMode.LOSSY1, 2.097681,
                           core=_ELLIPSE_CORE),
    'fig12': _cloak_preset(_ELLIPSE, ScatterMode.LOSSY2, 1.747153,
                           core=_ELLIPSE_CORE)
}
"""Partial configuration documents reproducing the reported runs."""

_NEUMANN_VARIANTS: typing.Final[typing.Dict[str, Document]] = {
    'table4': {
        'ite': {
            'selection': 'smallest',
            'count': 6
        }
    },
    'table5': {
        'ite': {
            'selection': 'smallest',
            'count': 6
        }
    }
}
"""Eigensolver settings of presets whose Neumann rows list the smallest
eigenvalues instead of those closest to a shift."""


def parse_override(text: str) -> Document:
    """Parse a 'section.key=value' override into a partial document (the
    value is read as YAML).

    Raises
    ------
    ConfigError
        If the override is malformed.

    """
    key, separator, value = text.partition('=')
    path = key.strip().split('.')
    if separator == '' or len(path) < 2 or not all(path):
        raise ConfigError('override must have the form section.key=value',
                          override=text)
    try:
        parsed = yaml.safe_load(value)
    except yaml.YAMLError:
        raise ConfigError('override value is not valid YAML', override=text)
    document: Document = {path[-1]: parsed}
    for part in reversed(path[:-1]):
        document = {part: document}
    return document


class SelectionStrategy(enum.Enum):
    """Enumeration of the eigenvalue selection strategies.

    """
    NEAREST = 'nearest'
    SMALLEST = 'smallest'


class FitCurve(enum.Enum):
    """Enumeration of the Herglotz fitting curves.

    """
    OUTER = 'outer'
    CAVITY = 'cavity'
    CIRCLE = 'circle'


class SweepAxis(enum.Enum):
    """Enumeration of the sweepable parameters.

    """
    H = 'h'
    TAU = 'tau'
    N_A = 'n_a'
    R = 'r'
    M = 'M'


class SweepPipeline(enum.Enum):
    """Enumeration of the pipelines run per sweep value.

    """
    ITE = 'ite'
    CLOAK = 'cloak'


@dataclasses.dataclass(frozen=True)
class MeshSettings:
    h: float
    degree: int


@dataclasses.dataclass(frozen=True)
class IteSettings:
    """Eigensolver settings.

    Attributes
    ----------
    n_c : float
        The refractive index of the shell.
    cavity_bc : CavityCondition
        The condition on the cavity boundary.
    selection : SelectionStrategy
        Whether the eigenvalues closest to the shift or the smallest
        ones are computed.
    shift : float
        The real part of the target shift.
    shift_imag : float
        The imaginary part of the target shift.
    count : int
        The number of requested eigenvalues.
    dump_eigenfunctions : bool
        Whether the eigenfunctions are written next to the eigenvalues.
    dump_matrices : bool
        Whether the block matrices are written in coordinate text format.

    """
    n_c: float
    cavity_bc: CavityCondition
    selection: SelectionStrategy
    shift: float
    shift_imag: float
    count: int
    dump_eigenfunctions: bool
    dump_matrices: bool = False

    @property
    def target(self) -> complex:
        return complex(self.shift, self.shift_imag)


@dataclasses.dataclass(frozen=True)
class HerglotzSettings:
    directions: int
    points: typing.Optional[int]
    regularizer: float
    curve: FitCurve
    curve_radius: typing.Optional[float]
    residual_threshold: float


@dataclasses.dataclass(frozen=True)
class ScatterSettings:
    """Scattering settings.

    Attributes
    ----------
    modes : tuple of ScatterMode
        The scattering problems solved per cloaking run.
    kappa : float or None
        The wavenumber (the eigenvalue nearest the eigensolver shift if
        None).
    gamma, tau, alpha, beta : float
        The lossy layer parameters.
    sigma_core, n_core : float
        The coefficients of the core.
    cavity_sigma, cavity_n : float or None
        The cavity coefficients of the penetrable mode.
    evaluation_radius : float
        The radius of the circle the scattering ratio is measured on.
    ratio_points : int
        The number of points on the evaluation circle.
    grid_points : int
        The number of field grid points per axis.

    """
    modes: typing.Tuple[ScatterMode, ...]
    kappa: typing.Optional[float]
    gamma: float
    tau: float
    alpha: float
    beta: float
    sigma_core: float
    n_core: float
    cavity_sigma: typing.Optional[float]
    cavity_n: typing.Optional[float]
    evaluation_radius: float
    ratio_points: int
    grid_points: int

    @property
    def cavity(self) -> typing.Optional[typing.Tuple[float, float]]:
        if self.cavity_sigma is None or self.cavity_n is None:
            return None
        return (self.cavity_sigma, self.cavity_n)


@dataclasses.dataclass(frozen=True)
class PmlSettings:
    exponent: int
    reflection: float


@dataclasses.dataclass(frozen=True)
class SweepSettings:
    """Parameter sweep settings.

    Attributes
    ----------
    axis : SweepAxis
        The swept parameter.
    values : tuple of float
        The parameter values (one pipeline run each).
    pipeline : SweepPipeline or None
        The pipeline run per value (the cloaking pipeline for the
        medium and Herglotz parameters, the eigenvalue pipeline
        otherwise, if None).
    number_workers : int
        The number of concurrent runs.

    """
    axis: SweepAxis
    values: typing.Tuple[float, ...]
    pipeline: typing.Optional[SweepPipeline]
    number_workers: int

    @property
    def effective_pipeline(self) -> SweepPipeline:
        if self.pipeline is not None:
            return self.pipeline
        if self.axis is SweepAxis.H:
            return SweepPipeline.ITE
        return SweepPipeline.CLOAK


@dataclasses.dataclass(frozen=True)
class OutputSettings:
    directory: str


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Effective settings of a workbench run.

    """
    geometry: GeometrySpec
    mesh: MeshSettings
    ite: IteSettings
    herglotz: HerglotzSettings
    scatter: ScatterSettings
    pml: PmlSettings
    sweep: SweepSettings
    output: OutputSettings

    @property
    def pml_config(self) -> PmlConfig:
        return PmlConfig(self.geometry.box_halfwidth,
                         self.geometry.pml_thickness, self.pml.exponent,
                         self.pml.reflection)

    @property
    def output_directory(self) -> pathlib.Path:
        return pathlib.Path(self.output.directory)


class _Schema(marshmallow.Schema):
    """Base schema of the configuration sections.

    """
    class Meta:
        unknown = marshmallow.EXCLUDE
        ordered = True

    _model: typing.ClassVar[typing.Callable[..., typing.Any]]

    @marshmallow.post_load
    def __make(self, data: Document, **kwargs: typing.Any) -> typing.Any:
        return self._make({
            key: tuple(value) if isinstance(value, list) else value
            for key, value in data.items()
        })

    def _make(self, data: Document) -> typing.Any:
        return type(self)._model(**data)


class _ShapeSchema(_Schema):
    shape = marshmallow.fields.Enum(ShapeKind, by_value=True,
                                    attribute='kind', required=True)
    a = marshmallow.fields.Float(required=True)
    b = marshmallow.fields.Float(allow_none=True, load_default=None)

    def _make(self, data: Document) -> Shape:
        b = data['a'] if data['b'] is None else data['b']
        return Shape(data['kind'], data['a'], b)


class _GeometrySchema(_Schema):
    _model = GeometrySpec
    outer = marshmallow.fields.Nested(_ShapeSchema, required=True)
    cavity = marshmallow.fields.Nested(_ShapeSchema, required=True)
    core = marshmallow.fields.Nested(_ShapeSchema, allow_none=True)
    box_halfwidth = marshmallow.fields.Float(required=True)
    pml_thickness = marshmallow.fields.Float(required=True)


class _MeshSchema(_Schema):
    _model = MeshSettings
    h = marshmallow.fields.Float(required=True)
    degree = marshmallow.fields.Integer(required=True)


class _IteSchema(_Schema):
    _model = IteSettings
    n_c = marshmallow.fields.Float(required=True)
    cavity_bc = marshmallow.fields.Enum(CavityCondition, by_value=True,
                                        required=True)
    selection = marshmallow.fields.Enum(SelectionStrategy, by_value=True,
                                        required=True)
    shift = marshmallow.fields.Float(required=True)
    shift_imag = marshmallow.fields.Float(required=True)
    count = marshmallow.fields.Integer(required=True)
    dump_eigenfunctions = marshmallow.fields.Boolean(required=True)
    dump_matrices = marshmallow.fields.Boolean(required=True)


class _HerglotzSchema(_Schema):
    _model = HerglotzSettings
    directions = marshmallow.fields.Integer(required=True)
    points = marshmallow.fields.Integer(allow_none=True, required=True)
    regularizer = marshmallow.fields.Float(required=True)
    curve = marshmallow.fields.Enum(FitCurve, by_value=True, required=True)
    curve_radius = marshmallow.fields.Float(allow_none=True, required=True)
    residual_threshold = marshmallow.fields.Float(required=True)


class _ScatterSchema(_Schema):
    _model = ScatterSettings
    modes = marshmallow.fields.List(
        marshmallow.fields.Enum(ScatterMode, by_value=True), required=True)
    kappa = marshmallow.fields.Float(allow_none=True, required=True)
    gamma = marshmallow.fields.Float(required=True)
    tau = marshmallow.fields.Float(required=True)
    alpha = marshmallow.fields.Float(required=True)
    beta = marshmallow.fields.Float(required=True)
    sigma_core = marshmallow.fields.Float(required=True)
    n_core = marshmallow.fields.Float(required=True)
    cavity_sigma = marshmallow.fields.Float(allow_none=True, required=True)
    cavity_n = marshmallow.fields.Float(allow_none=True, required=True)
    evaluation_radius = marshmallow.fields.Float(required=True)
    ratio_points = marshmallow.fields.Integer(required=True)
    grid_points = marshmallow.fields.Integer(required=True)


class _PmlSchema(_Schema):
    _model = PmlSettings
    exponent = marshmallow.fields.Integer(required=True)
    reflection = marshmallow.fields.Float(required=True)


class _SweepSchema(_Schema):
    _model = SweepSettings
    axis = marshmallow.fields.Enum(SweepAxis, by_value=True, required=True)
    values = marshmallow.fields.List(marshmallow.fields.Float(),
                                     required=True)
    pipeline = marshmallow.fields.Enum(SweepPipeline, by_value=True,
                                       allow_none=True, required=True)
    number_workers = marshmallow.fields.Integer(required=True)


class _OutputSchema(_Schema):
    _model = OutputSettings
    directory = marshmallow.fields.String(required=True)


class _RunConfigSchema(_Schema):
    _model = RunConfig
    geometry = marshmallow.fields.Nested(_GeometrySchema, required=True)
    mesh = marshmallow.fields.Nested(_MeshSchema, required=True)
    ite = marshmallow.fields.Nested(_IteSchema, required=True)
    herglotz = marshmallow.fields.Nested(_HerglotzSchema, required=True)
    scatter = marshmallow.fields.Nested(_ScatterSchema, required=True)
    pml = marshmallow.fields.Nested(_PmlSchema, required=True)
    sweep = marshmallow.fields.Nested(_SweepSchema, required=True)
    output = marshmallow.fields.Nested(_OutputSchema, required=True)


config = Config(_DEFAULT_FILE_NAME)
"""Singleton object holding the configuration values."""


def load_config(file_path: typing.Optional[str] = None, reload: bool = True,
                preset: typing.Optional[str] = None,
                overrides: typing.Sequence[Document] = ()) -> None:
    """Load the configuration from a configuration file.

    Parameters
    ----------
    file_path : str or None
        The path to the configuration file (typical configuration file
        locations are searched if none is specified).
    reload : bool
        If True, the configuration is also loaded if it was already
        loaded before.
    preset : str or None
        The name of a preset merged over the file contents.
    overrides : sequence of dict
        Partial documents merged last (e.g. from the command line).

    Raises
    ------
    ConfigError
        If the configuration cannot be loaded (e.g. due to an invalid
        configuration file or an unknown preset).

    See Also
    --------
    Config.load

    """
    if not reload and config.is_loaded():
        return
    patches: typing.List[Document] = []
    if preset is not None:
        try:
            patches.append(PRESETS[preset])
        except KeyError:
            raise ConfigError('unknown preset', preset=preset,
                              presets=sorted(PRESETS))
        cavity_bc = PRESETS[preset]['ite'].get('cavity_bc')
        for override in overrides:
            cavity_bc = override.get('ite', {}).get('cavity_bc', cavity_bc)
        if (cavity_bc == CavityCondition.NEUMANN.value
                and preset in _NEUMANN_VARIANTS):
            patches.append(_NEUMANN_VARIANTS[preset])
    patches.extend(overrides)
    config.load(_VALIDATION_SCHEMA, file_path, patches)


def parse_run_config(document: Document) -> RunConfig:
    """Validate a configuration document and build its run settings.

    Raises
    ------
    ConfigError
        If the document is invalid.

    """
    normalized = validate_document(_VALIDATION_SCHEMA, document)
    try:
        return _RunConfigSchema().load(normalized)
    except marshmallow.ValidationError as error:
        raise ConfigError('invalid configuration', errors=error.messages)
    except CloakSimError as error:
        raise ConfigError('invalid configuration', errors=str(error))


def get_run_config() -> RunConfig:
    """Get the run settings of the loaded configuration.

    Raises
    ------
    ConfigError
        If no configuration has been loaded or it is invalid.

    """
    return parse_run_config(config.document)


def dump_config(run_config: RunConfig) -> str:
    """Serialize the effective run settings (defaults expanded) to YAML.

    """
    document = _plain(_RunConfigSchema().dump(run_config))
    return yaml.safe_dump(document, sort_keys=False)


def _plain(value: typing.Any) -> typing.Any:
    # Ordered schemas dump OrderedDict instances, which safe_dump rejects
    if isinstance(value, typing.Mapping):
        return {key: _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    return value
