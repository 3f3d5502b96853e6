"""gen-data: write a synthetic preference dataset."""

import argparse
import logging

from app.cli.common import EXIT_OK, add_config_flag, require_file_stores, resolve_settings
from app.dependencies import get_dataset_repository
from app.services.synthdata_service import gen_dataset, make_world


logger = logging.getLogger(__name__)

FLAGS = {
    "vocab": "vocab_size",
    "prompt_len": "prompt_len",
    "resp_len": "resp_len",
    "overlap": "overlap",
    "corruption": "corruption",
    "pairs": "pairs",
    "seed": "seed",
}


def register(subparsers) -> None:
    parser = subparsers.add_parser("gen-data", help="generate a synthetic preference dataset")
    parser.add_argument("--vocab", type=int, help="vocabulary size V (default 32)")
    parser.add_argument("--prompt-len", type=int, help="prompt length (default 4)")
    parser.add_argument("--resp-len", type=int, help="response length L (default 10)")
    parser.add_argument("--overlap", type=float, help="shared-prefix ratio in [0, 1) (default 0.8)")
    parser.add_argument(
        "--corruption", choices=["suffix-replace", "interleave"],
        help="how the rejected response departs after the shared prefix",
    )
    parser.add_argument("--pairs", type=int, help="number of pairs M (default 2000)")
    parser.add_argument("--seed", type=int, help="generation seed (default 1)")
    parser.add_argument("--out", required=True, help="dataset file to write")
    add_config_flag(parser)
    parser.set_defaults(handler=cmd_gen_data)


def cmd_gen_data(args: argparse.Namespace) -> int:
    settings = resolve_settings(args, FLAGS)
    require_file_stores(settings)
    world = make_world(
        vocab_size=settings.vocab_size,
        prompt_len=settings.prompt_len,
        resp_len=settings.resp_len,
        overlap=settings.overlap,
        corruption=settings.corruption,
        seed=settings.seed,
    )
    dataset = gen_dataset(world, settings.pairs)
    digest = get_dataset_repository(settings).save(dataset, args.out)
    print(f"wrote {len(dataset)} pairs to {args.out} (manifest sha256 {digest})")
    return EXIT_OK
