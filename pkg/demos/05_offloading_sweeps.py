# Measure Internet traffic offloading across the three scenario sweeps and
# show the ablation bounds: no in-network copies versus universal copies.
from icnsim import ScenarioParams, compute_ito, run_scenario, run_sweep, sweep_report
from icnsim.evaluation import RequestRecord, reports_to_csv

base = dict(n_devices=128, request_count=150, catalog_size=24,
            cache_fraction=0.5, prefetch_budget=12, seed=0)

# ITO weighs hop savings against the cache-free baseline route, per byte:
records = [
    RequestRecord(1, paths=[1], volume=2, baseline_hops=4),
    RequestRecord(2, paths=[3], volume=1, baseline_hops=6),
]
print("worked ITO example:", compute_ito(records), "(= 9/14)")

# One sweep point per axis value; each runs the full pipeline.
for scenario, values in (
    ("embb", (8, 64, 512)),       # data rate, Mb/s
    ("urllc", (1, 16, 128)),      # access latency, ms
    ("mmtc", (63, 262)),          # density, kilo-objects per km^2
):
    reports = run_scenario(ScenarioParams(scenario=scenario, sweep_values=values, **base))
    curve = {r.sweep_value: round(r.ito, 3) for r in reports}
    print(f"{scenario:6s} ITO per sweep point: {curve}")

# Ablation bounds on one point.
off = ScenarioParams(scenario="embb", sweep_values=(8,),
                     **{**base, "cache_fraction": 0.0, "prefetch_budget": 0})
lo = run_scenario(off)[0].ito
hi_params = ScenarioParams(scenario="embb", sweep_values=(8,),
                           preplace_everywhere=True, **base)
hi = run_scenario(hi_params)[0].ito
print(f"\nablation: no copies -> ITO {lo};  copies everywhere -> ITO {hi:.3f}")

# Multi-seed statistics, the same table the CLI's report subcommand emits.
reports = run_sweep(
    ScenarioParams(scenario="embb", sweep_values=(8, 64), **base), seeds=[0, 1, 2]
)
print("\nper-run rows:")
print(reports_to_csv(reports))
print("summary across seeds:")
print(sweep_report(reports))
