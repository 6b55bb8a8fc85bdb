"""
Full Pipeline Script
synth -> train x3 strategies -> predict x3 -> fuse --search -> eval

Usage:
    python scripts/run_pipeline.py --out runs/demo
    python scripts/run_pipeline.py --out runs/demo --epochs 50 --decoder baseline
    python scripts/run_pipeline.py --out runs/small --samples 60 --epochs 2 --hidden-dim 4
"""

import argparse
import sys
from datetime import datetime
from pathlib import Path

from dotenv import load_dotenv

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))

load_dotenv()

from fusionkit.cli import main as fusionkit_main  # noqa: E402
from fusionkit.dao import DatasetDAO  # noqa: E402
from fusionkit.dao.base_dao import write_document  # noqa: E402
from fusionkit.services.dataset_service import DatasetService  # noqa: E402


def run(step: str, argv: list) -> None:
    print(f"▶ {step}: fusionkit {' '.join(argv)}")
    code = fusionkit_main(argv)
    if code != 0:
        print(f"❌ {step} failed with exit code {code}")
        sys.exit(code)


def main(argv=None) -> int:
    """Run every stage into one output directory"""
    parser = argparse.ArgumentParser(description='Run the end-to-end fusion pipeline')
    parser.add_argument('--out', default='runs/pipeline', help='Output directory')
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--samples', type=int, default=1000)
    parser.add_argument('--epochs', type=int, default=None)
    parser.add_argument('--hidden-dim', type=int, default=None)
    parser.add_argument('--decoder', choices=['jdev', 'baseline'], default='jdev')
    parser.add_argument('--grid-step', type=float, default=0.05)
    args = parser.parse_args(argv)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    print(f"🚀 Pipeline started at {datetime.now().strftime('%Y-%m-%d %H:%M:%S')} -> {out}")

    spec_path = out / 'synth_spec.json'
    write_document(spec_path, {'num_samples': args.samples, 'seed': args.seed})
    data_path = out / 'data.jsonl'
    run('synth', ['synth', '--spec', str(spec_path), '--out', str(data_path)])

    # One fixed split shared by every strategy so predictions align on the same ids
    dao = DatasetDAO()
    _, samples = dao.load(data_path)
    train_set, val_set = DatasetService.split(samples, 0.8, args.seed)
    train_path, val_path = out / 'train.jsonl', out / 'val.jsonl'
    dao.write(train_path, train_set)
    dao.write(val_path, val_set)

    prediction_paths = []
    for strategy in (1, 2, 3):
        checkpoint = out / f'strategy{strategy}.ckpt.json'
        train_argv = ['train', '--data', str(train_path), '--val-data', str(val_path), '--out', str(checkpoint),
                      '--strategy', str(strategy), '--decoder', args.decoder, '--seed', str(args.seed)]
        if args.epochs is not None:
            train_argv += ['--epochs', str(args.epochs)]
        if args.hidden_dim is not None:
            train_argv += ['--hidden-dim', str(args.hidden_dim)]
        run(f'train strategy {strategy}', train_argv)

        predictions = out / f'strategy{strategy}.predictions.jsonl'
        run(f'predict strategy {strategy}',
            ['predict', '--checkpoint', str(checkpoint), '--data', str(val_path), '--out', str(predictions)])
        run(f'eval strategy {strategy}', ['eval', '--checkpoint', str(checkpoint), '--data', str(val_path)])
        prediction_paths.append(str(predictions))

    fused = out / 'fused.predictions.jsonl'
    run('fuse', ['fuse', '--predictions', *prediction_paths, '--search', '--labels', str(val_path),
                 '--grid-step', str(args.grid_step), '--out', str(fused)])
    run('eval fused', ['eval', '--predictions', str(fused), '--data', str(val_path)])

    print(f"🎉 Pipeline completed at {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    return 0


if __name__ == '__main__':
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\n⚠️  Pipeline cancelled by user")
        sys.exit(1)
