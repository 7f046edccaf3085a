# cli.py - Command-line entry point: dataset generation, training, evaluation, sweeps, gradient check
"""
Usage:
    nblink gen-dataset --config F --out D --episodes N --seed S
    nblink train --config F --dataset D --out M --epochs E --seed S
    nblink eval --config F --policy {static|threshold|mab|smartcon} [--model M] [--dataset D] --out metrics.csv --seed S
    nblink sweep --config F --ues 10..100[:step] --policy P [P ...] [--model M] --out sweep.csv [--xlsx sweep.xlsx]
    nblink check-grads --seed S

Exit status is 0 on success, 1 with a one-line diagnostic on stderr when
a file or configuration is bad, 2 on a usage error.
"""
import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import psutil

# Calculate the project's root directory
script_dir = os.path.dirname(os.path.abspath(__file__))
project_root = os.path.dirname(os.path.dirname(script_dir))  # Go up two levels
if project_root not in sys.path:
    sys.path.append(project_root)

from NbLink.config import NbLinkConfig, RunConfig
from NbLink.core.file_system import FileSystem
from NbLink.core.mab_engine import generate_dataset
from NbLink.core.simulator import Simulator, run_policy
from NbLink.gan.gradcheck import check_grads
from NbLink.gan.trainer import GanTrainer, prediction_mape, split_dataset
from NbLink.policies import POLICY_NAMES, make_policy
from NbLink.utils.errors import ConfigError, NbLinkError
from NbLink.utils.log_service import LoggingService, configure_defaults
from NbLink.utils.regex import RegexPatterns


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=NbLinkConfig.DEFAULT_CONFIG_FILE, help="key = value run configuration")
    common.add_argument("--log-dir", default=None, help="also write dated log files here")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")

    parser = argparse.ArgumentParser(prog="nblink", description="NB-IoT link-adaptation workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-dataset", parents=[common], help="record MAB-driven simulation traces")
    p.add_argument("--out", required=True)
    p.add_argument("--episodes", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("train", parents=[common], help="train the adversarial point-process model")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, required=True)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-progress", action="store_true")

    p = sub.add_parser("eval", parents=[common], help="simulate one policy and write a metrics row")
    p.add_argument("--policy", required=True, choices=POLICY_NAMES)
    p.add_argument("--model", default=None, help="checkpoint, required for smartcon")
    p.add_argument("--dataset", default=None, help="training dataset: mab warm start, held-out MAPE, retrain checks")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-seed", type=int, default=None, help="seed the model was trained with, default --seed")

    p = sub.add_parser("sweep", parents=[common], help="eval over a range of UE counts")
    p.add_argument("--ues", required=True, type=ue_range, help="first..last[:step]")
    p.add_argument("--policy", nargs="+", choices=POLICY_NAMES, default=["static", "threshold", "mab"])
    p.add_argument("--model", default=None)
    p.add_argument("--dataset", default=None, help="training dataset: mab warm start, held-out MAPE, retrain checks")
    p.add_argument("--out", required=True)
    p.add_argument("--xlsx", default=None, help="also write a summary workbook")
    p.add_argument("--workers", type=int, default=None, help="default: physical cores")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-seed", type=int, default=None)

    p = sub.add_parser("check-grads", parents=[common], help="finite-difference gradient check")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--tolerance", type=float, default=1e-4)
    return parser


def ue_range(text):
    """'10..100' or '10..100:10' -> list of UE counts"""
    match = RegexPatterns().match('ue_range', text.strip())
    if match is None:
        raise argparse.ArgumentTypeError(f"expected first..last[:step], got {text!r}")
    first, last = int(match.group(1)), int(match.group(2))
    step = int(match.group(3) or 10)
    if first < 1 or last < first or step < 1:
        raise argparse.ArgumentTypeError(f"empty or invalid UE range {text!r}")
    return list(range(first, last + 1, step))


def load_config(args):
    run_config = RunConfig.from_file(args.config)
    overrides = {}
    if args.log_dir is not None:
        overrides["log_dir"] = args.log_dir
    if args.log_level is not None:
        overrides["log_level"] = args.log_level
    if overrides:
        run_config = run_config.with_overrides(**overrides)
    configure_defaults(run_config.log_dir, run_config.log_level)
    return run_config


# Commands

def cmd_gen_dataset(args, run_config, fs, logger):
    simulator = Simulator(run_config.sim_config(), run_config.channel_params(), run_config.link_space(), logger)
    records = generate_dataset(args.episodes, simulator, run_config.mab_params(), args.seed,
                               run_config.idle_sample_every, logger=logger)
    fs.write_dataset(args.out, records)
    return 0


def cmd_train(args, run_config, fs, logger):
    dataset = fs.read_dataset(args.dataset)
    trainer = GanTrainer(run_config.gan_settings(show_progress=not args.no_progress), logger)
    result = trainer.train(dataset, args.epochs, args.lr, args.seed)
    fs.write_checkpoint(args.out, result.model)
    return 0


def load_model(args, run_config, fs, policies):
    if "smartcon" not in policies:
        return None
    if args.model is None:
        raise ConfigError("model: smartcon needs --model")
    return fs.read_checkpoint(args.model, expected_hidden=run_config.hidden)


def evaluate(run_config, policy_name, seed, model=None, dataset=None, n_ues=None, train_seed=None, logger=None):
    """
    One simulation run of `policy_name`. With a dataset, mab starts from
    the recorded trace and smartcon gets retrain checks plus the MAPE over
    the test sequences held out when training with `train_seed`.
    """
    sim_config = run_config.sim_config(**({} if n_ues is None else {"n_ues": n_ues}))
    training_plr = [rec.plr for rec in dataset if rec.alpha] if dataset else None
    policy = make_policy(policy_name, run_config, model, seed, training_plr, warm_records=dataset, logger=logger)
    report = run_policy(policy, sim_config, run_config.channel_params(), run_config.link_space(), seed, logger)
    if policy_name == "smartcon" and dataset:
        _, held_out, _ = split_dataset(dataset, run_config.sequence_window_ms, run_config.mu,
                                       seed if train_seed is None else train_seed)
        report.mape_avg = prediction_mape(model, held_out, run_config.max_prb) if held_out else None
    return report


def cmd_eval(args, run_config, fs, logger):
    model = load_model(args, run_config, fs, [args.policy])
    dataset = fs.read_dataset(args.dataset) if args.dataset else None
    report = evaluate(run_config, args.policy, args.seed, model, dataset, train_seed=args.train_seed, logger=logger)
    fs.write_metrics(args.out, [report])
    return 0


def _sweep_job(job):
    run_config, policy_name, n_ues, seed, model, dataset, train_seed = job
    configure_defaults(run_config.log_dir, run_config.log_level)
    return evaluate(run_config, policy_name, seed, model, dataset, n_ues, train_seed)


def cmd_sweep(args, run_config, fs, logger):
    model = load_model(args, run_config, fs, args.policy)
    dataset = fs.read_dataset(args.dataset) if args.dataset else None
    jobs = [(run_config, name, n_ues, args.seed, model, dataset, args.train_seed)
            for n_ues in args.ues for name in args.policy]
    workers = args.workers or psutil.cpu_count(logical=False) or 1
    workers = max(1, min(workers, len(jobs)))
    logger.info(f"Sweep: {len(jobs)} runs on {workers} worker(s)")
    if workers == 1:
        reports = [_sweep_job(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_sweep_job, jobs))
    fs.write_metrics(args.out, reports)
    if args.xlsx:
        try:
            fs.write_workbook(args.xlsx, reports)
        except BaseException:
            os.remove(args.out)
            raise
    return 0


def cmd_check_grads(args, run_config, fs, logger):
    report = check_grads(seed=args.seed, seeds=args.seeds, tolerance=args.tolerance)
    name = max(report.max_error, key=report.max_error.get, default="-")
    line = (f"check-grads: worst relative error {report.worst:.3e} ({name}) over {report.seeds} cases, "
            f"tolerance {report.tolerance:g}")
    print(line if report.passed else line + " FAILED")
    return 0 if report.passed else 1


COMMANDS = {
    "gen-dataset": cmd_gen_dataset,
    "train": cmd_train,
    "eval": cmd_eval,
    "sweep": cmd_sweep,
    "check-grads": cmd_check_grads,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    try:
        run_config = load_config(args)
        logger = LoggingService("nblink")
        fs = FileSystem(NbLinkConfig, logger)
        return COMMANDS[args.command](args, run_config, fs, logger)
    except (NbLinkError, OSError) as e:
        message = str(e).splitlines()[0] if str(e) else type(e).__name__
        print(f"nblink {args.command}: error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
