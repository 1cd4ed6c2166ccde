"""Randomized invariant suites, shared by the CLI and the acceptance tests.

Each suite draws a configurable number of random cases and returns a
SuiteResult; failures carry the first offending case description.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from .adapters.audio import FaceCrossAttention
from .adapters.hoi import HoiAdapterLayer
from .backbone.rope import apply_rope, invert_rope, rope_phases
from .inference.segments import plan_segments


@dataclass
class SuiteResult:
    name: str
    passed: bool
    cases: int
    detail: str = ""


def run_masked_locality_suite(trials: int = 100, seed: int = 0) -> SuiteResult:
    """Tokens outside the object/face mask are exactly unchanged; a zero mask
    is a full identity. Random weights, inputs, and masks every trial."""
    g = torch.Generator().manual_seed(seed)
    d_model, n_heads, n_video, n_obj = 32, 2, 10, 4
    vid_phases = rope_phases(
        torch.arange(n_video), torch.zeros(n_video, dtype=torch.long),
        torch.arange(n_video), d_model // n_heads,
    )
    obj_phases = rope_phases(
        torch.full((n_obj,), -2), torch.zeros(n_obj, dtype=torch.long),
        torch.arange(n_obj), d_model // n_heads,
    )
    for trial in range(trials):
        variant = ("self_attn", "cross_attn")[trial % 2]
        torch.manual_seed(seed * 100000 + trial)
        hoi = HoiAdapterLayer(d_model, n_heads, variant=variant)
        face = FaceCrossAttention(d_model, n_heads)
        with torch.no_grad():
            for p in list(hoi.parameters()) + list(face.parameters()):
                p.normal_(std=0.5)
        video = torch.randn(1, n_video, d_model, generator=g)
        obj = torch.randn(1, n_obj, d_model, generator=g)
        audio = torch.randn(1, 3, d_model, generator=g)
        sem_t = torch.randn(1, d_model, generator=g)
        frame_ids = torch.arange(n_video) % 3
        mask = (torch.rand(1, n_video, generator=g) < 0.5).float()

        out_hoi = hoi(video, obj, mask, sem_t, vid_phases, obj_phases)
        out_face = face(video, audio, mask, frame_ids)
        off = mask[0] == 0
        if not torch.equal(out_hoi[0, off], video[0, off]):
            return SuiteResult("masked-locality", False, trial + 1, f"hoi leak (trial {trial})")
        if not torch.equal(out_face[0, off], video[0, off]):
            return SuiteResult("masked-locality", False, trial + 1, f"face leak (trial {trial})")
        zero = torch.zeros(1, n_video)
        if not torch.equal(hoi(video, obj, zero, sem_t, vid_phases, obj_phases), video):
            return SuiteResult("masked-locality", False, trial + 1, "hoi zero-mask not identity")
        if not torch.equal(face(video, audio, zero, frame_ids), video):
            return SuiteResult("masked-locality", False, trial + 1, "face zero-mask not identity")
    return SuiteResult("masked-locality", True, trials)


def run_rope_suite(trials: int = 50, seed: int = 0) -> SuiteResult:
    """Relative-position property and rotation invertibility on random draws."""
    g = torch.Generator().manual_seed(seed)
    d_head = 16
    for trial in range(trials):
        q = torch.randn(d_head, generator=g, dtype=torch.float64)
        k = torch.randn(d_head, generator=g, dtype=torch.float64)
        a = int(torch.randint(-2, 6, (1,), generator=g))
        b = int(torch.randint(-2, 6, (1,), generator=g))
        shift = int(torch.randint(1, 5, (1,), generator=g))
        row, col = 1, 3

        def logit(fa, fb):
            pa = rope_phases(torch.tensor([fa]), torch.tensor([row]), torch.tensor([col]), d_head)
            pb = rope_phases(torch.tensor([fb]), torch.tensor([row]), torch.tensor([col]), d_head)
            return float(apply_rope(q[None, None], pa)[0, 0] @ apply_rope(k[None, None], pb)[0, 0])

        if abs(logit(a, b) - logit(a + shift, b + shift)) > 1e-9:
            return SuiteResult("rope", False, trial + 1, f"relative shift broken at ({a},{b})+{shift}")
        phases = rope_phases(
            torch.tensor([a]), torch.tensor([row]), torch.tensor([col]), d_head
        )
        restored = invert_rope(apply_rope(q[None, None], phases), phases)[0, 0]
        if (restored - q).abs().max() > 1e-6:
            return SuiteResult("rope", False, trial + 1, "rotation not invertible")
    return SuiteResult("rope", True, trials)


def run_blend_weight_suite(trials: int = 100, seed: int = 0) -> SuiteResult:
    """Segment-plan weights: exact unit sums (in blend order), full cover,
    and exact identity when blending identical segments."""
    from .inference.segments import blend_segments

    rng = np.random.default_rng(seed)
    for trial in range(trials):
        f_total = int(rng.integers(1, 64))
        length = int(rng.integers(2, 13))
        overlap = int(rng.integers(1, length))
        plan = plan_segments(f_total, length, overlap)
        sums = plan.frame_weight_sums()
        if not (sums == 1.0).all():
            return SuiteResult(
                "blend-weights", False, trial + 1,
                f"weights sum {sums.min()}..{sums.max()} for ({f_total},{length},{overlap})",
            )
        covered = set()
        for a, b in plan.windows:
            covered.update(range(a, b))
        if covered != set(range(f_total)):
            return SuiteResult("blend-weights", False, trial + 1, "cover gap")
        if (plan.weights < 0).any() or (plan.weights > 1).any():
            return SuiteResult("blend-weights", False, trial + 1, "weight outside [0,1]")
        ones = [
            torch.ones(1, b - a, 2, 2, 1, dtype=torch.float64)
            for a, b in plan.windows
        ]
        if not torch.equal(
            blend_segments(ones, plan), torch.ones(1, f_total, 2, 2, 1, dtype=torch.float64)
        ):
            return SuiteResult(
                "blend-weights", False, trial + 1,
                f"identical-segment blend not exact for ({f_total},{length},{overlap})",
            )
    return SuiteResult("blend-weights", True, trials)


def run_all(seed: int = 0) -> list[SuiteResult]:
    return [
        run_masked_locality_suite(seed=seed),
        run_rope_suite(seed=seed),
        run_blend_weight_suite(seed=seed),
    ]
