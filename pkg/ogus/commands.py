"""
The subcommands of the ``ogus`` command-line front end.

Every subcommand is a :class:`Command` plugin registered in the
``ogus.commands`` entry-point group. A command reads its inputs through a
:class:`Session`, which records their digests, the verdicts and any artifact
written with ``--output``; :meth:`Command.run` returns the exit status.
"""
import hashlib
import logging
from concurrent.futures import ThreadPoolExecutor

from ogus import devissage, diagrams, realization, settings, structures
from ogus.exceptions import InputFileError, MalformedInputError
from ogus.fields import (
    Field, Integer, ListField, MappingField, Record, RecordField, String, canonical_json, load_document,
)
from ogus.filtered import (
    NOT_ADMISSIBLE, UNDETERMINED, FilteredPhiModule, check_admissible, hodge_polygon, hodge_slopes, newton_polygon,
    newton_slopes_at,
)
from ogus.linalg import format_rational
from ogus.plugin import Plugin
from ogus.polynomials import lies_above

log = logging.getLogger(__name__)

OK = 0
INVALID = 1
UNDECIDED = 2


class CommandReport(Record):
    """
    What one invocation read, decided and wrote.
    """
    command = String()
    status = Integer()
    inputs = MappingField(String(), default={})
    verdicts = ListField(Field(), default=())
    artifacts = ListField(String(), default=())
    seed = Integer(default=None)

    def render_text(self):
        lines = ["ogus {}: exit {}".format(self.command, self.status)]
        lines.extend("input {} sha256:{}".format(path, digest) for path, digest in self.inputs.items())
        if self.seed is not None:
            lines.append("seed: {}".format(self.seed))
        for verdict in self.verdicts:
            lines.append("[{}]".format(verdict.get('kind', 'verdict')))
            for key in sorted(verdict):
                if key == 'kind':
                    continue
                value = verdict[key]
                text = value if isinstance(value, str) else canonical_json(value).replace('\n', '').replace('  ', '')
                lines.append("  {}: {}".format(key, text))
        lines.extend("artifact: {}".format(path) for path in self.artifacts)
        return "\n".join(lines)


class Session:
    """
    Inputs, verdicts and artifacts of one command invocation.
    """

    def __init__(self, name, options):
        self.name = name
        self.options = options
        self.inputs = {}
        self.verdicts = []
        self.artifacts = []
        self._payloads = []
        self._seed = None

    def load_document(self, path):
        try:
            with open(path, 'rb') as handle:
                raw = handle.read()
        except OSError as exc:
            raise InputFileError(path, exc.strerror or str(exc)) from exc
        self.inputs[path] = hashlib.sha256(raw).hexdigest()
        try:
            text = raw.decode('utf-8')
        except UnicodeDecodeError as exc:
            raise MalformedInputError("{} is not UTF-8 text".format(path)) from exc
        doc = load_document(text)
        self._payloads.append(canonical_json(doc))
        return doc

    def load(self, path, record_class):
        return record_class.from_json(self.load_document(path))

    @property
    def seed(self):
        if self._seed is None:
            given = getattr(self.options, 'seed', None)
            self._seed = given if given is not None else settings.default_seed("\n".join(self._payloads))
        return self._seed

    @property
    def samples(self):
        return getattr(self.options, 'samples', None)

    def verdict(self, kind, **data):
        entry = {'kind': kind}
        entry.update(data)
        self.verdicts.append(entry)

    def artifact(self, value):
        path = getattr(self.options, 'output', None)
        if not path:
            return
        try:
            with open(path, 'w', encoding='utf-8') as handle:
                handle.write(canonical_json(value) + "\n")
        except OSError as exc:
            raise InputFileError(path, exc.strerror or str(exc)) from exc
        log.debug('wrote %s', path)
        self.artifacts.append(path)

    def report(self, status, randomized=False):
        return CommandReport(
            command=self.name,
            status=status,
            inputs=self.inputs,
            verdicts=self.verdicts,
            artifacts=self.artifacts,
            seed=self.seed if randomized and self._payloads else None,
        )


def status_of(validation):
    if not validation.valid:
        return INVALID
    if not validation.decided:
        return UNDECIDED
    return OK


def _matrices(mapping):
    return {key: matrix.to_json() for key, matrix in mapping.items()}


def _rationals(values):
    return [format_rational(value) for value in values]


def _vertices(polygon):
    return [[x, format_rational(y)] for x, y in polygon]


class Command(Plugin):
    """
    Base class of the subcommands.

    `operations` names the library operations the command exposes.
    """
    entry_point = 'ogus.commands'
    help = None
    operations = ()
    randomized = False

    def __init__(self, session):
        self.session = session
        self.options = session.options

    @classmethod
    def add_arguments(cls, parser):
        """
        Add the command's own arguments to `parser`.
        """

    def run(self):
        raise NotImplementedError


class ValidateCommand(Command):
    help = "Validate an Ogus object"
    operations = ('structures.validate',)
    randomized = True

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('file')

    def run(self):
        obj = self.session.load(self.options.file, structures.OgusObject)
        validation = structures.validate(obj, seed=self.session.seed, samples=self.session.samples)
        self.session.verdict('validation', clauses=validation.clauses, **validation.to_json())
        return status_of(validation)


class ValidateACommand(Command):
    help = "Validate an MFOg^a object"
    operations = ('realization.validate_a',)
    randomized = True

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('file')

    def run(self):
        obj = self.session.load(self.options.file, realization.MFOgAObject)
        validation = realization.validate_a(obj, seed=self.session.seed, samples=self.session.samples)
        self.session.verdict('validation', clauses=validation.clauses, **validation.to_json())
        return status_of(validation)


def _load_module(session, path):
    doc = session.load_document(path)
    if not isinstance(doc, dict):
        raise MalformedInputError("{} must hold a JSON object".format(path))
    if 't_dr' in doc:
        return structures.OgusObject.from_json(doc).filtered_phi()
    return FilteredPhiModule.from_json(doc)


class CheckAdmissibleCommand(Command):
    help = "Decide weak admissibility at one place, or at every non-exempt place"
    operations = ('filtered.check_admissible',)
    randomized = True

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('file')
        parser.add_argument('--place', default=None)

    def run(self):
        module = _load_module(self.session, self.options.file)
        if self.options.place is not None:
            places = [self.options.place]
        else:
            places = [frobenius.place for frobenius in module.frobenii if not frobenius.exempt]
        seed, samples = self.session.seed, self.session.samples
        with ThreadPoolExecutor() as pool:
            verdicts = list(pool.map(lambda label: check_admissible(module, label, seed=seed, samples=samples), places))
        for verdict in sorted(verdicts, key=lambda verdict: verdict.place):
            self.session.verdict('admissibility', **verdict.to_json())
        statuses = {verdict.status for verdict in verdicts}
        if NOT_ADMISSIBLE in statuses:
            return INVALID
        if UNDETERMINED in statuses:
            return UNDECIDED
        return OK


class PolygonsCommand(Command):
    help = "Hodge and Newton slopes and polygons of a filtered phi-module"
    operations = ('filtered.hodge_polygon', 'filtered.newton_polygon')

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('file')
        parser.add_argument('--place', default=None)

    def run(self):
        module = _load_module(self.session, self.options.file)
        places = [self.options.place] if self.options.place is not None else list(module.places)
        for place in places:
            newton = newton_slopes_at(module, place)
            self.session.verdict(
                'polygons',
                place=place,
                hodge_slopes=_rationals(hodge_slopes(module)),
                newton_slopes=_rationals(newton),
                hodge_polygon=_vertices(hodge_polygon(module)),
                newton_polygon=_vertices(newton_polygon(module, place)),
                newton_above_hodge=lies_above(newton, hodge_slopes(module)),
            )
        return OK


class HomCommand(Command):
    help = "A basis of the morphisms between two Ogus objects"
    operations = ('structures.hom',)

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('source')
        parser.add_argument('target')

    def run(self):
        source = self.session.load(self.options.source, structures.OgusObject)
        target = self.session.load(self.options.target, structures.OgusObject)
        basis = structures.hom(source, target)
        self.session.verdict('hom', dim=len(basis), basis=[morphism.matrix.to_json() for morphism in basis])
        return OK


class HomACommand(Command):
    help = "A basis of the morphisms between two MFOg^a objects"
    operations = ('realization.hom_a',)

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('source')
        parser.add_argument('target')

    def run(self):
        source = self.session.load(self.options.source, realization.MFOgAObject)
        target = self.session.load(self.options.target, realization.MFOgAObject)
        basis = realization.hom_a(source, target)
        self.session.verdict('hom', dim=len(basis), basis=[
            {name: getattr(morphism, name).to_json() for name in ('eta', 'on_a0', 'on_a1', 'on_b0', 'on_b1')}
            for morphism in basis
        ])
        return OK


class HomMotivesCommand(Command):
    help = "A basis of the morphisms between two linearized motives"
    operations = ('devissage.hom_motives', 'devissage.forgetting_rank')
    randomized = True

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('source')
        parser.add_argument('target')

    def run(self):
        source = self.session.load(self.options.source, devissage.LinearizedLaumonMotive)
        target = self.session.load(self.options.target, devissage.LinearizedLaumonMotive)
        basis = devissage.hom_motives(source, target)
        self.session.verdict(
            'hom',
            dim=len(basis),
            basis=[{name: getattr(morphism, name).to_json() for name in devissage.UNKNOWNS} for morphism in basis],
            **{key: value for key, value in devissage.forgetting_rank(source, target).items() if key != 'dim'}
        )
        return OK


class KernelCommand(Command):
    help = "The kernel of an Ogus morphism or of a diagram morphism"
    operations = ('structures.kernel', 'diagrams.kernel_object')
    randomized = True
    construction = 'kernel'

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('file')

    def _diagram(self, morphism):
        if self.construction == 'kernel':
            return diagrams.kernel_object(morphism)
        return diagrams.cokernel_object(morphism)

    def _ogus(self, morphism):
        if self.construction == 'kernel':
            return structures.kernel(morphism, seed=self.session.seed, samples=self.session.samples)
        return structures.cokernel(morphism, seed=self.session.seed, samples=self.session.samples)

    def run(self):
        doc = self.session.load_document(self.options.file)
        if isinstance(doc, dict) and 'components' in doc:
            obj, structural = self._diagram(diagrams.DiagramMorphism.from_json(doc))
            self.session.verdict(self.construction, object=obj.to_json(), morphism=_matrices(structural.components))
            self.session.artifact(obj.to_json())
            return OK
        result = self._ogus(structures.OgusMorphism.from_json(doc))
        self.session.verdict(
            self.construction,
            object=result.obj.to_json(),
            morphism=result.morphism.matrix.to_json(),
            validation=result.validation.to_json(),
        )
        self.session.artifact(result.obj.to_json())
        return status_of(result.validation)


class CokernelCommand(KernelCommand):
    help = "The cokernel of an Ogus morphism or of a diagram morphism"
    operations = ('structures.cokernel', 'diagrams.cokernel_object')
    construction = 'cokernel'


class StrictnessCommand(Command):
    help = "Weight and Hodge strictness of an Ogus morphism"
    operations = ('structures.strictness_audit',)

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('file')

    def run(self):
        morphism = self.session.load(self.options.file, structures.OgusMorphism)
        self.session.verdict('strictness', **structures.strictness_audit(morphism).to_json())
        return OK


class Ext1Command(Command):
    help = "Ext^1 between two diagram objects"
    operations = ('diagrams.ext1_basis',)

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('source')
        parser.add_argument('target')

    def run(self):
        source = self.session.load(self.options.source, diagrams.DiagramObject)
        target = self.session.load(self.options.target, diagrams.DiagramObject)
        ext = diagrams.ext1_basis(source, target)
        self.session.verdict(
            'ext1',
            dim=ext.dimension,
            hom_dim=diagrams.hom_dimension(source, target),
            representatives=[_matrices(cocycle) for cocycle in ext.representatives()],
        )
        return OK


class FibreProductRequest(Record):
    """
    Two shapes and the selections along which they are glued.
    """
    x = RecordField(diagrams.DiagramShape)
    y = RecordField(diagrams.DiagramShape)
    f = RecordField(diagrams.Selection)
    g = RecordField(diagrams.Selection)
    objects = ListField(RecordField(diagrams.FibreProductObject), default=())

    def product(self):
        return diagrams.FibreProduct(self.x, self.y, self.f, self.g)


class LesRequest(Record):
    x = RecordField(diagrams.DiagramShape)
    y = RecordField(diagrams.DiagramShape)
    f = RecordField(diagrams.Selection)
    g = RecordField(diagrams.Selection)
    a = RecordField(diagrams.FibreProductObject)
    b = RecordField(diagrams.FibreProductObject)


class FibreProductCommand(Command):
    help = "The combined shape of a fibre product over Mod"
    operations = ('diagrams.fibre_product_category',)

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('file')

    def run(self):
        request = self.session.load(self.options.file, FibreProductRequest)
        shape = diagrams.fibre_product_category(request.x, request.y, request.f, request.g)
        product = request.product()
        objects = [product.combine(pair).to_json() for pair in request.objects]
        self.session.verdict('fibre-product', shape=shape.to_json(), objects=objects)
        self.session.artifact({'shape': shape.to_json(), 'objects': objects})
        return OK


class LesCheckCommand(Command):
    help = "Exactness of the long exact Hom/Ext sequence of a fibre product"
    operations = ('diagrams.les_check',)

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('file')

    def run(self):
        request = self.session.load(self.options.file, LesRequest)
        product = diagrams.FibreProduct(request.x, request.y, request.f, request.g)
        report = diagrams.les_check(product, request.a, request.b)
        self.session.verdict('les', **report.to_json())
        return OK if report.all_exact else INVALID


class SplittingData(Record):
    """
    A section sigma of q and a lift of du through T -> T/Fil^0.
    """
    sigma = Field()
    lift = Field()


class DevissageCommand(Command):
    help = "Validate a linearized motive and emit its devissage"
    operations = (
        'devissage.validate_motive', 'devissage.build_gamma', 'devissage.assemble', 'devissage.disassemble',
        'devissage.fibre_presentation',
    )
    randomized = True

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('file')
        parser.add_argument('--roundtrip', action='store_true')
        parser.add_argument('--splitting', default=None, help="JSON file with sigma and lift to build gamma from")

    def run(self):
        motive = self.session.load(self.options.file, devissage.LinearizedLaumonMotive)
        if self.options.splitting:
            splitting = self.session.load(self.options.splitting, SplittingData)
            gamma = devissage.build_gamma(motive, splitting.sigma, splitting.lift)
            motive = motive.with_gamma(gamma)
            self.session.verdict('gamma', gamma=gamma.to_json())
        validation = devissage.validate_motive(motive, seed=self.session.seed, samples=self.session.samples)
        self.session.verdict('validation', clauses=validation.clauses, **validation.to_json())
        status = status_of(validation)
        if self.options.roundtrip:
            times, row = devissage.disassemble(motive)
            identical = devissage.assemble(times, row) == motive
            self.session.verdict('roundtrip', identical=identical, times=times.to_json(), row=row.to_json())
            if not identical:
                status = INVALID
        if validation.valid:
            presentation = devissage.fibre_presentation(motive)
            self.session.verdict('presentation', object=presentation.to_json())
            self.session.artifact(motive.to_json())
        return status


class TaCommand(Command):
    help = "The MFOg^a realization of a linearized motive"
    operations = ('realization.t_a',)

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('file')

    def run(self):
        motive = self.session.load(self.options.file, devissage.LinearizedLaumonMotive)
        obj = realization.t_a(motive)
        self.session.verdict('object', object=obj.to_json())
        self.session.artifact(obj.to_json())
        return OK


class EmbedCommand(Command):
    help = "Embed a level <= 1 Ogus object into MFOg^a"
    operations = ('realization.embed_level1',)

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('file')

    def run(self):
        obj = realization.embed_level1(self.session.load(self.options.file, structures.OgusObject))
        self.session.verdict('object', object=obj.to_json())
        self.session.artifact(obj.to_json())
        return OK


class SharpCommand(Command):
    help = "The sharp de Rham realization of an MFOg^a object"
    operations = ('realization.sharp_s',)

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('file')

    def run(self):
        sharp = realization.sharp_s(self.session.load(self.options.file, realization.MFOgAObject))
        self.session.verdict('sharp', **sharp.to_json())
        return OK


class KernelACommand(Command):
    help = "The componentwise kernel of an MFOg^a morphism"
    operations = ('realization.kernel_a',)

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('file')

    def _construct(self, morphism):
        return realization.kernel_a(morphism)

    def run(self):
        morphism = self.session.load(self.options.file, realization.MFOgAMorphism)
        result = self._construct(morphism)
        self.session.verdict(self.plugin_name, object=result.obj.to_json())
        self.session.artifact(result.obj.to_json())
        return OK


class CokernelACommand(KernelACommand):
    help = "The componentwise cokernel of an MFOg^a morphism"
    operations = ('realization.cokernel_a',)

    def _construct(self, morphism):
        return realization.cokernel_a(morphism)


Command.builtins = {
    'validate': 'ogus.commands:ValidateCommand',
    'validate-a': 'ogus.commands:ValidateACommand',
    'check-admissible': 'ogus.commands:CheckAdmissibleCommand',
    'polygons': 'ogus.commands:PolygonsCommand',
    'hom': 'ogus.commands:HomCommand',
    'hom-a': 'ogus.commands:HomACommand',
    'hom-motives': 'ogus.commands:HomMotivesCommand',
    'kernel': 'ogus.commands:KernelCommand',
    'cokernel': 'ogus.commands:CokernelCommand',
    'strictness': 'ogus.commands:StrictnessCommand',
    'ext1': 'ogus.commands:Ext1Command',
    'fibre-product': 'ogus.commands:FibreProductCommand',
    'les-check': 'ogus.commands:LesCheckCommand',
    'devissage': 'ogus.commands:DevissageCommand',
    'ta': 'ogus.commands:TaCommand',
    'embed': 'ogus.commands:EmbedCommand',
    'sharp': 'ogus.commands:SharpCommand',
    'kernel-a': 'ogus.commands:KernelACommand',
    'cokernel-a': 'ogus.commands:CokernelACommand',
}
