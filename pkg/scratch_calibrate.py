"""Scratch calibration: acceptance criteria 5/6/7 margins across seeds."""
import json
import time

import splitq as s
from splitq.metrics import evaluate
from splitq.rewards import RewardConfig
from splitq.trainer import TrainConfig, ablation_suite, train
from splitq.world import WorldSpec, generic_schema

SPEC = WorldSpec(kind="generic", n_objects=16, schema=generic_schema(4, 4))
EVAL_SEED = 777
EVAL_GAMES = 2000

def cfg(seed, epochs=150, j_max=5, **rw):
    return TrainConfig(
        epochs=epochs, games_per_epoch=640, batch_size=64, j_max=j_max,
        world_spec=SPEC, master_seed=seed, reward_config=RewardConfig(**rw),
    )

def ev(params, rcfg, j_max=5):
    from dataclasses import replace
    rcfg = replace(rcfg, j_max=j_max)
    return evaluate(params, SPEC, rcfg, EVAL_GAMES, s.GREEDY, EVAL_SEED)

results = {}
t0 = time.time()

# --- criterion 5: without r_s, 150 epochs, 5 seeds
c5 = {}
for seed in range(5):
    tc = cfg(seed, use_rs=False)
    params, _ = train(tc)
    r = ev(params, tc.rollout_config())
    c5[seed] = dict(trained=r.success_rate)
    print(f"[c5 seed {seed}] trained={r.success_rate:.3f}  ({time.time()-t0:.0f}s)", flush=True)
tc0 = cfg(0)
base_r = ev(s.initial_params(), tc0.rollout_config())
ref_r = ev(s.hand_bisection_params(), tc0.rollout_config())
results["c5"] = dict(per_seed=c5, untrained=base_r.success_rate, reference=ref_r.success_rate)
print("untrained", base_r.success_rate, "reference", ref_r.success_rate, flush=True)

# --- criteria 6/7: with r_s base, leaner budget
EPOCHS_67 = 60
c67 = {}
for seed in range(5):
    base = cfg(seed, epochs=EPOCHS_67, use_rs=True)
    variants = dict([("full", base)] + ablation_suite(base))
    row = {}
    for name, tc in variants.items():
        params, _ = train(tc)
        r5 = ev(params, tc.rollout_config(), j_max=5)
        r6 = ev(params, tc.rollout_config(), j_max=6)
        row[name] = dict(
            succ=r5.success_rate, rep=r5.repetition_rate,
            tr5=r5.T_over_R, tr6=r6.T_over_R,
        )
        print(f"[c67 seed {seed} {name}] succ={r5.success_rate:.3f} rep={r5.repetition_rate:.3f} "
              f"T/R5={r5.T_over_R} T/R6={r6.T_over_R} ({time.time()-t0:.0f}s)", flush=True)
    c67[seed] = row
results["c67"] = c67

with open("scratch_calib.json", "w") as f:
    json.dump(results, f, indent=2)
print("TOTAL", time.time() - t0, flush=True)
