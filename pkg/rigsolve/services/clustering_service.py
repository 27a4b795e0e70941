import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

from rigsolve.core.exceptions import DomainError, UsageError
from rigsolve.domain.clustering import METHODS, build_clustering
from rigsolve.domain.rig import offset_matrix
from rigsolve.domain.scores import mark_knee, score_clustering
from rigsolve.models.clustering import Clustering, ClusterScores, SweepRecord
from rigsolve.models.rig import BlendshapeModel

logger = logging.getLogger(__name__)


class ClusteringService:

    def cluster(
        self,
        model: BlendshapeModel,
        method: str,
        k: Optional[int] = None,
        seed: Optional[int] = None,
        segments: Optional[Sequence[Sequence[int]]] = None,
    ) -> Tuple[Clustering, ClusterScores]:
        D = offset_matrix(model)
        clustering = build_clustering(model, method, k=k, seed=seed, segments=segments, D=D)
        scores = score_clustering(D, clustering)
        logger.info(
            f"✅ {method} K={clustering.K}: E_D={scores.density:.3f} "
            f"E_ID={scores.inter_density:.3f} E_R={scores.reconstruction_error:.3f}"
        )
        return clustering, scores

    def sweep_k(
        self,
        model: BlendshapeModel,
        method: str,
        k_values: Sequence[int],
        repeats: int,
        seed: int,
        segments: Optional[Sequence[Sequence[int]]] = None,
        workers: int = 1,
    ) -> List[SweepRecord]:
        """
        Cluster and score every (K, repeat); repeat r runs with seed + r.
        Failed runs come back as records carrying `error`, the sweep goes on.
        """
        if method not in METHODS:
            raise UsageError(f"unknown clustering method '{method}', expected one of {METHODS}")
        if repeats < 1:
            raise UsageError("repeats must be at least 1")

        D = offset_matrix(model)
        if method == "sparse":
            jobs = [(model.m, 0)]
        elif method == "ssk":
            if segments is None:
                raise UsageError("the ssk method needs manual mesh segments")
            jobs = [(len(segments), 0)]
        else:
            if not k_values:
                raise UsageError("empty K range")
            jobs = [(int(k), r) for k in sorted(set(k_values)) for r in range(repeats)]

        def run(job: Tuple[int, int]) -> SweepRecord:
            k, r = job
            run_seed = seed + r
            record = SweepRecord(method=method, K=k, repeat=r, seed=run_seed)
            try:
                clustering = build_clustering(model, method, k=k, seed=run_seed, segments=segments, D=D)
                return record.model_copy(update={"scores": score_clustering(D, clustering)})
            except DomainError as e:
                logger.warning(f"⚠️ {method} K={k} seed={run_seed} failed: {e.message}")
                return record.model_copy(update={"error": e.message})

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                records = list(pool.map(run, jobs))
        else:
            records = [run(job) for job in jobs]

        records.sort(key=lambda rec: (rec.K, rec.repeat))
        return mark_knee(records)
