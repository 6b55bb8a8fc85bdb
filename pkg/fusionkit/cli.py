"""
Command-line front door cho fusionkit

Subcommands: synth, train, eval, predict, fuse, gradcheck, table, compare.
Exit codes: 0 success, 1 usage/config, 2 data/schema/contract, 3 numeric.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from fusionkit import configure_logging, load_config
from fusionkit.dao import CheckpointDAO, DatasetDAO, HistoryDAO, PredictionDAO
from fusionkit.dao.base_dao import read_document, write_document
from fusionkit.exceptions import (
    ContractException,
    FusionKitException,
    GradientCheckException,
    UsageException,
)
from fusionkit.services.dataset_service import DatasetService
from fusionkit.services.ensemble_service import EnsembleService
from fusionkit.services.experiment_service import DEFAULT_SEEDS, ExperimentService
from fusionkit.services.gradcheck_service import GradCheckService
from fusionkit.services.metrics_service import MetricsService
from fusionkit.services.training_service import TrainingService
from fusionkit.utils.report import (
    error_lines,
    format_comparison,
    format_gradcheck,
    format_report,
    format_reference_table,
    success_line,
)
from fusionkit.validators.run_config import (
    RunConfig,
    TrainConfig,
    parse_run_config,
    parse_synth_spec,
    parse_train_config,
)

logger = logging.getLogger(__name__)

DEFAULT_TRAIN_FRACTION = 0.8
MIN_REFERENCE_MATCHES = 11

# flag dest -> TrainConfig field
TRAIN_OVERRIDES = {
    'strategy': 'strategy',
    'decoder': 'decoder',
    'loss': 'loss',
    'seed': 'seed',
    'lr': 'learning_rate',
    'epochs': 'max_epochs',
    'batch_size': 'batch_size',
    'hidden_dim': 'hidden_dim',
    'patience': 'patience',
    'num_classes': 'num_classes',
}


class CommandParser(argparse.ArgumentParser):
    """ArgumentParser that reports misuse as UsageException (exit 1)"""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageException(message)


def _split_list(value: str) -> List[str]:
    return [item.strip() for item in value.split(',') if item.strip()]


def parse_weights(value: str) -> List[float]:
    """'0.5,0.3,0.2' -> [0.5, 0.3, 0.2]"""
    try:
        return [float(item) for item in _split_list(value)]
    except ValueError:
        raise UsageException(f"--weights expects comma-separated numbers, got '{value}'")


def require_files(*paths: Optional[str]) -> None:
    """
    Raises:
        ContractException: FILE_NOT_FOUND for the first missing path
    """
    for path in paths:
        if path is not None and not Path(path).is_file():
            raise ContractException(f"File not found: {path}", error_code='FILE_NOT_FOUND',
                                    details={'path': str(path)})


def load_run_config(path: Optional[str]) -> RunConfig:
    if path is None:
        return RunConfig()
    require_files(path)
    document = read_document(path)
    if not isinstance(document, dict):
        raise UsageException(f"Config file {path} must hold an object")
    return parse_run_config(document)


def train_config_from(args: argparse.Namespace, run_config: RunConfig) -> TrainConfig:
    """Config file values, then flag overrides, re-validated"""
    data: Dict[str, Any] = run_config.train.model_dump(mode='json')
    for dest, field_name in TRAIN_OVERRIDES.items():
        value = getattr(args, dest, None)
        if value is not None:
            data[field_name] = value
    if getattr(args, 'streams', None):
        data['streams'] = _split_list(args.streams)
    if getattr(args, 'no_clip', False):
        data['grad_clip'] = None
    return parse_train_config(data)


def _emit(args: argparse.Namespace, human: str, data: Any) -> None:
    if getattr(args, 'json', False):
        print(success_line(data=data))
    else:
        print(human)


# Commands

def cmd_synth(args: argparse.Namespace) -> int:
    run_config = load_run_config(args.config)
    spec_path = args.spec
    if spec_path is None and run_config.synth is None:
        raise UsageException("synth needs --spec or a config file with a 'synth' section")
    if spec_path is not None:
        require_files(spec_path)
        document = read_document(spec_path)
        if not isinstance(document, dict):
            raise UsageException(f"Spec file {spec_path} must hold an object")
        if args.seed is not None:
            document['seed'] = args.seed
        spec = parse_synth_spec(document)
    else:
        spec = run_config.synth
        if args.seed is not None:
            spec = parse_synth_spec({**spec.model_dump(), 'seed': args.seed})

    out = args.out or run_config.paths.data
    if out is None:
        raise UsageException("synth needs --out")
    count = DatasetDAO().write(out, DatasetService.generate_synthetic(spec))
    print(success_line(data={'path': str(out), 'samples': count}, message='Synthetic dataset written'))
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    run_config = load_run_config(args.config)
    config = train_config_from(args, run_config)
    data_path = args.data or run_config.paths.data or run_config.paths.train_data
    val_path = args.val_data or run_config.paths.val_data
    out = args.out or run_config.paths.checkpoint
    if data_path is None or out is None:
        raise UsageException("train needs --data and --out")
    require_files(data_path, val_path)

    dao = DatasetDAO()
    manifest, samples = dao.load(data_path, config.num_classes)
    if val_path is not None:
        _, val_set = dao.load(val_path, manifest.num_classes)
        train_set = samples
    else:
        fraction = args.train_fraction if args.train_fraction is not None else DEFAULT_TRAIN_FRACTION
        train_set, val_set = DatasetService.split(samples, fraction, config.seed)

    checkpoint, history = TrainingService.train(config, train_set, val_set, manifest=manifest)
    CheckpointDAO().save(out, checkpoint)
    history_path = args.history or run_config.paths.history or str(Path(out).with_suffix('.history.jsonl'))
    HistoryDAO().save(history_path, history)

    print(success_line(
        data={
            'checkpoint': str(out),
            'history': str(history_path),
            'epochs_run': len(history),
            'best_epoch': checkpoint.epoch,
            'best_com': checkpoint.best_score
        },
        message='Training finished'
    ))
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    run_config = load_run_config(args.config)
    data_path = args.data or run_config.paths.data or run_config.paths.val_data
    if data_path is None:
        raise UsageException("eval needs --data")
    if (args.checkpoint is None) == (args.predictions is None):
        raise UsageException("eval needs exactly one of --checkpoint or --predictions")
    require_files(data_path, args.checkpoint, args.predictions)

    if args.checkpoint is not None:
        checkpoint = CheckpointDAO().load(args.checkpoint)
        _, samples = DatasetDAO().load(data_path, checkpoint.num_classes)
        report = TrainingService.evaluate(checkpoint, samples)
    else:
        predictions = PredictionDAO().load(args.predictions)
        _, samples = DatasetDAO().load(data_path, predictions[0].num_classes)
        report = MetricsService.score_predictions(predictions, samples, dim_weight=run_config.train.dim_weight)

    _emit(args, format_report(report), report.to_dict())
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    run_config = load_run_config(args.config)
    data_path = args.data or run_config.paths.data
    checkpoint_path = args.checkpoint or run_config.paths.checkpoint
    out = args.out or run_config.paths.out
    if data_path is None or checkpoint_path is None or out is None:
        raise UsageException("predict needs --checkpoint, --data and --out")
    require_files(checkpoint_path, data_path)

    checkpoint = CheckpointDAO().load(checkpoint_path)
    _, samples = DatasetDAO().load(data_path, checkpoint.num_classes)
    count = PredictionDAO().write(out, TrainingService.predict(checkpoint, samples))
    print(success_line(data={'path': str(out), 'predictions': count}, message='Predictions written'))
    return 0


def cmd_fuse(args: argparse.Namespace) -> int:
    run_config = load_run_config(args.config)
    paths = args.predictions or run_config.paths.predictions
    if not paths:
        raise UsageException("fuse needs --predictions")
    weights = parse_weights(args.weights) if args.weights else run_config.ensemble.weights
    if args.search and args.weights:
        raise UsageException("--weights and --search are mutually exclusive")
    if not args.search and weights is None:
        raise UsageException("fuse needs --weights or --search")
    if args.search and args.labels is None:
        raise UsageException("--search needs --labels")
    require_files(*paths, args.labels)

    members = [PredictionDAO().load(path) for path in paths]
    samples = None
    if args.labels is not None:
        _, samples = DatasetDAO().load(args.labels, members[0][0].num_classes)

    dim_weight = run_config.train.dim_weight
    if args.search:
        grid_step = args.grid_step if args.grid_step is not None else run_config.ensemble.grid_step
        result = EnsembleService.search_weights(members, samples, grid_step=grid_step, dim_weight=dim_weight)
        weights = list(result.weights)
        print(f"weights={','.join(f'{k:.4f}' for k in weights)} candidates={result.candidates_evaluated}")

    fused = EnsembleService.fuse_predictions(members, weights)
    if args.out:
        PredictionDAO().write(args.out, fused)
    if samples is not None:
        report = MetricsService.score_predictions(fused, samples, dim_weight=dim_weight)
        _emit(args, format_report(report), {'weights': list(weights), 'report': report.to_dict()})
    else:
        print(success_line(data={'weights': list(weights), 'path': args.out, 'predictions': len(fused)}))
    return 0


def cmd_gradcheck(args: argparse.Namespace) -> int:
    settings = load_config()
    run_config = load_run_config(args.config)
    options = {
        'hidden_dim': settings['GRADCHECK_HIDDEN_DIM'],
        'num_classes': settings['GRADCHECK_NUM_CLASSES'],
        'batch_size': settings['GRADCHECK_BATCH'],
        'step': settings['GRADCHECK_STEP'],
        'tol': settings['GRADCHECK_TOLERANCE'],
        'seed': settings['SEED'],
    }
    # Only values the config file sets explicitly replace the small gradcheck sizes
    for field_name in ('hidden_dim', 'num_classes', 'seed'):
        if field_name in run_config.train.model_fields_set:
            options[field_name] = getattr(run_config.train, field_name)
    for dest in ('hidden_dim', 'num_classes', 'batch_size', 'step', 'tol', 'seed'):
        value = getattr(args, dest, None)
        if value is not None:
            options[dest] = value

    cases = GradCheckService.check_all(**options)
    print(format_gradcheck(cases))
    failed = [case.to_dict() for case in cases if not case.report.passed]
    if failed:
        raise GradientCheckException(f"{len(failed)} of {len(cases)} gradient checks failed", failures=failed)
    return 0


def cmd_table(args: argparse.Namespace) -> int:
    settings = load_config()
    rows = MetricsService.reproduce_reference(dim_weight=settings['COMBINED_DIM_WEIGHT'])
    print(format_reference_table(rows))
    matched = sum(1 for _, _, ok in rows if ok)
    if matched < MIN_REFERENCE_MATCHES:
        raise ContractException(
            f"Only {matched} of {len(rows)} reference rows reproduce",
            error_code='REFERENCE_MISMATCH',
            details={'matched': matched}
        )
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    seeds = [int(s) for s in _split_list(args.seeds)] if args.seeds else list(DEFAULT_SEEDS)
    train_overrides = {}
    if args.epochs is not None:
        train_overrides['max_epochs'] = args.epochs
    if args.hidden_dim is not None:
        train_overrides['hidden_dim'] = args.hidden_dim
    synth_overrides = {}
    if args.samples is not None:
        synth_overrides['num_samples'] = args.samples
    if args.feature_noise is not None:
        synth_overrides['feature_noise'] = args.feature_noise

    comparison = ExperimentService.compare_decoders(seeds, synth_overrides=synth_overrides,
                                                    train_overrides=train_overrides)
    result: Dict[str, Any] = {'decoders': comparison.to_dict()}
    print(format_comparison(comparison.rows, ['seed', 'jdev_dis', 'baseline_dis', 'jdev_dim', 'baseline_dim']))
    print(f"jdev wins {comparison.jdev_wins}/{len(comparison.rows)}; "
          f"mean relative MSE reduction {comparison.mean_relative_reduction:.4f}; "
          f"mean dis {comparison.mean_dis:.4f}")

    if args.ensemble:
        gain = ExperimentService.ensemble_gain(seeds, synth_overrides=synth_overrides,
                                               train_overrides=train_overrides)
        result['ensemble'] = gain.to_dict()
        print(format_comparison(gain.rows, ['seed', 'best_member_com', 'fused_com']))
        print(f"ensemble strictly better on {gain.strict_gains}/{len(gain.rows)} seeds")

    if args.out:
        write_document(args.out, result)
    return 0


def _add_train_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--strategy', type=int, choices=[1, 2, 3])
    parser.add_argument('--decoder', choices=['jdev', 'baseline'])
    parser.add_argument('--loss', choices=['uncertainty', 'fixed-equal'])
    parser.add_argument('--seed', type=int)
    parser.add_argument('--lr', type=float)
    parser.add_argument('--epochs', type=int)
    parser.add_argument('--batch-size', type=int)
    parser.add_argument('--hidden-dim', type=int)
    parser.add_argument('--patience', type=int)
    parser.add_argument('--num-classes', type=int)
    parser.add_argument('--streams', help='Comma-separated stream subset')
    parser.add_argument('--no-clip', action='store_true', help='Disable gradient clipping')


def build_parser() -> CommandParser:
    parser = CommandParser(prog='fusionkit', description='Hierarchical audio-visual fusion toolkit')
    parser.add_argument('--log-level', help='Override LOG_LEVEL')
    sub = parser.add_subparsers(dest='command', required=True)

    synth = sub.add_parser('synth', help='Generate a synthetic labeled dataset')
    synth.add_argument('--spec')
    synth.add_argument('--config')
    synth.add_argument('--out')
    synth.add_argument('--seed', type=int)
    synth.set_defaults(handler=cmd_synth)

    train = sub.add_parser('train', help='Train one fusion system')
    train.add_argument('--config')
    train.add_argument('--data')
    train.add_argument('--val-data')
    train.add_argument('--train-fraction', type=float)
    train.add_argument('--out')
    train.add_argument('--history')
    _add_train_flags(train)
    train.set_defaults(handler=cmd_train)

    evaluate = sub.add_parser('eval', help='Score a checkpoint or a prediction file')
    evaluate.add_argument('--config')
    evaluate.add_argument('--checkpoint')
    evaluate.add_argument('--predictions')
    evaluate.add_argument('--data')
    evaluate.add_argument('--json', action='store_true')
    evaluate.set_defaults(handler=cmd_eval)

    predict = sub.add_parser('predict', help='Export predictions of a checkpoint')
    predict.add_argument('--config')
    predict.add_argument('--checkpoint')
    predict.add_argument('--data')
    predict.add_argument('--out')
    predict.set_defaults(handler=cmd_predict)

    fuse = sub.add_parser('fuse', help='Decision-level fusion of prediction files')
    fuse.add_argument('--config')
    fuse.add_argument('--predictions', nargs='+')
    fuse.add_argument('--weights', help='k1,k2,...')
    fuse.add_argument('--search', action='store_true')
    fuse.add_argument('--grid-step', type=float)
    fuse.add_argument('--labels')
    fuse.add_argument('--out')
    fuse.add_argument('--json', action='store_true')
    fuse.set_defaults(handler=cmd_fuse)

    gradcheck = sub.add_parser('gradcheck', help='Finite-difference check of every model combination')
    gradcheck.add_argument('--config')
    gradcheck.add_argument('--hidden-dim', type=int)
    gradcheck.add_argument('--num-classes', type=int)
    gradcheck.add_argument('--batch-size', type=int)
    gradcheck.add_argument('--step', type=float)
    gradcheck.add_argument('--tol', type=float)
    gradcheck.add_argument('--seed', type=int)
    gradcheck.set_defaults(handler=cmd_gradcheck)

    table = sub.add_parser('table', help='Recompute combined scores of the reference table')
    table.set_defaults(handler=cmd_table)

    compare = sub.add_parser('compare', help='JDEV vs baseline decoder across seeds')
    compare.add_argument('--seeds', help='Comma-separated seeds')
    compare.add_argument('--epochs', type=int)
    compare.add_argument('--hidden-dim', type=int)
    compare.add_argument('--samples', type=int)
    compare.add_argument('--feature-noise', type=float)
    compare.add_argument('--ensemble', action='store_true', help='Also measure ensemble gain')
    compare.add_argument('--out')
    compare.set_defaults(handler=cmd_compare)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments and run one command

    Returns:
        Process exit code
    """
    try:
        settings = load_config()
        args = build_parser().parse_args(argv)
        if args.log_level:
            settings['LOG_LEVEL'] = args.log_level
        configure_logging(settings)
        return args.handler(args)
    except FusionKitException as e:
        machine, human = error_lines(e)
        print(machine, file=sys.stderr)
        print(human, file=sys.stderr)
        return e.exit_code


if __name__ == '__main__':
    sys.exit(main())
