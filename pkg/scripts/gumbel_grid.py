"""Gumbel band coverage and mean length at T = 256, next to published values."""

from _common import emit, parser

from specband.sim import ExperimentConfig, coverage_experiment

PUBLISHED = {
    # (model, M) -> ((Cov90, ML90), (Cov95, ML95))
    ("iid", 10): ((84.0, 0.12), (89.4, 0.13)), ("iid", 14): ((79.0, 0.15), (85.0, 0.16)),
    ("iid", 22): ((69.0, 0.20), (74.4, 0.21)),
    ("I", 10): ((76.2, 0.25), (84.0, 0.28)), ("I", 14): ((74.8, 0.32), (80.8, 0.35)),
    ("I", 22): ((68.2, 0.45), (74.8, 0.49)),
    ("II", 10): ((68.4, 0.77), (75.8, 0.84)), ("II", 14): ((71.2, 0.98), (76.6, 1.07)),
    ("III", 10): ((60.2, 0.16), (65.8, 0.18)), ("III", 14): ((59.6, 0.21), (66.0, 0.22)),
}


def main():
    p = parser(__doc__)
    p.add_argument("--models", nargs="+", default=["iid", "I"], choices=["iid", "I", "II", "III"])
    p.add_argument("--convention", default="squared", choices=["squared", "standard"])
    args = p.parse_args()
    rows = []
    for (model, M), ref in PUBLISHED.items():
        if model not in args.models:
            continue
        cfg = ExperimentConfig(model=model, T=256, M=M, method="gumbel", R=args.reps, seed=args.seed,
                               threads=args.threads, gumbel_convention=args.convention)
        res = coverage_experiment(cfg)
        for row, (ref_cov, ref_ml) in zip(res.rows, ref):
            rows.append([model, M, row.level, row.Cov, round(row.ML, 4), ref_cov, ref_ml])
    emit(["model", "M", "level", "Cov", "ML", "Cov_published", "ML_published"], rows, args.output)


if __name__ == "__main__":
    main()
