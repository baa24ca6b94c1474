"""Bootstrap band coverage and mean length at T = 256, M = 10, next to published values.

Example: ``python3 scripts/bootstrap_grid.py --models I III --reps 200``
"""

from _common import emit, parser

from specband.sim import ExperimentConfig, coverage_experiment

PUBLISHED = {
    # model -> {b: ((Cov90, ML90), (Cov95, ML95))}
    "I": {1.0: ((92.6, 0.56), (94.0, 0.63)), 1.5: ((90.6, 0.47), (92.4, 0.53)), 2.0: ((89.2, 0.43), (91.4, 0.49))},
    "II": {6.5: ((90.8, 1.46), (94.4, 1.68)), 7.0: ((90.0, 1.42), (94.0, 1.64)), 7.5: ((90.0, 1.38), (92.8, 1.59))},
    "III": {1.0: ((86.0, 0.18), (91.0, 0.20)), 1.5: ((82.8, 0.17), (89.4, 0.19)), 2.0: ((82.2, 0.17), (87.6, 0.19))},
}


def main():
    p = parser(__doc__)
    p.add_argument("--models", nargs="+", default=["I"], choices=sorted(PUBLISHED))
    p.add_argument("--no-demean", action="store_true")
    args = p.parse_args()
    rows = []
    for model in args.models:
        for b, ref in PUBLISHED[model].items():
            cfg = ExperimentConfig(model=model, T=256, M=10, bandwidth=b, R=args.reps, seed=args.seed,
                                   threads=args.threads, demean=not args.no_demean)
            res = coverage_experiment(cfg)
            for row, (ref_cov, ref_ml) in zip(res.rows, ref):
                rows.append([model, b, row.level, row.Cov, round(row.ML, 4), ref_cov, ref_ml])
    emit(["model", "b_T", "level", "Cov", "ML", "Cov_published", "ML_published"], rows, args.output)


if __name__ == "__main__":
    main()
