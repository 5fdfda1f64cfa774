"""Multi-stage job recommendation.

Stage 1 retrieves up to 100 candidate postings by embedding similarity;
stage 2 scores five components (semantic, skills Jaccard, location decay,
salary alignment, recency half-life) and hard-filters eligibility; stage 3
converts component scores to an application probability via a logistic
model fit on interaction logs; stage 4 greedily picks a top-k set that
trades probability against category/location/department diversity.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .embedding import DEFAULT_EMBEDDER, fnv1a_64
from .errors import FuturePostDate, IndexUnavailable, InvalidCoordinate
from .vector_index import IndexEntry, VectorIndex

EARTH_RADIUS_KM = 6371.0
LOCATION_FREE_KM = 50.0  # no penalty inside this radius
LOCATION_DECAY_KM = 50.0  # e-folding distance beyond the free radius
RECENCY_HALF_LIFE_DAYS = 7.0
CANDIDATE_LIMIT = 100

# ordinal education levels used by eligibility checks
EDUCATION_LEVELS = {
    "none": 0,
    "matric": 1,
    "senior_secondary": 2,
    "diploma": 3,
    "bachelor": 4,
    "master": 5,
    "doctorate": 6,
}


@dataclass(frozen=True)
class Location:
    name: str
    lat: float
    lon: float

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0) or not (-180.0 <= self.lon <= 180.0):
            raise InvalidCoordinate(f"({self.lat}, {self.lon})")


@dataclass
class JobPosting:
    job_id: str
    title: str
    description: str
    category: str
    department: str
    location: Location
    salary_min: float
    salary_max: float
    required_skills: frozenset[str]
    min_education: int
    age_range: tuple[int, int]
    citizenship_required: bool
    posted_at: datetime

    def __post_init__(self):
        if self.salary_min > self.salary_max:
            raise ValueError("salary_min exceeds salary_max")
        if self.age_range[0] > self.age_range[1]:
            raise ValueError("age_range reversed")
        self.required_skills = frozenset(self.required_skills)
        if self.posted_at.tzinfo is None:
            self.posted_at = self.posted_at.replace(tzinfo=timezone.utc)

    @property
    def embedding_text(self) -> str:
        return " ".join([self.title, self.description, *sorted(self.required_skills)])

    @property
    def index_id(self) -> int:
        h = fnv1a_64(self.job_id.encode("utf-8"))
        return h - (1 << 64) if h >= (1 << 63) else h

    def to_json(self) -> dict:
        return {
            "job_id": self.job_id,
            "title": self.title,
            "description": self.description,
            "category": self.category,
            "department": self.department,
            "location": {"name": self.location.name, "lat": self.location.lat,
                         "lon": self.location.lon},
            "salary_min": self.salary_min,
            "salary_max": self.salary_max,
            "required_skills": sorted(self.required_skills),
            "min_education": self.min_education,
            "age_range": list(self.age_range),
            "citizenship_required": self.citizenship_required,
            "posted_at": self.posted_at.isoformat(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "JobPosting":
        return cls(
            job_id=obj["job_id"],
            title=obj["title"],
            description=obj["description"],
            category=obj["category"],
            department=obj["department"],
            location=Location(**obj["location"]),
            salary_min=obj["salary_min"],
            salary_max=obj["salary_max"],
            required_skills=frozenset(obj["required_skills"]),
            min_education=obj["min_education"],
            age_range=tuple(obj["age_range"]),
            citizenship_required=obj["citizenship_required"],
            posted_at=datetime.fromisoformat(obj["posted_at"]),
        )


@dataclass
class CandidateProfile:
    user_id: str
    skills: set[str]
    education_level: int
    age: int
    citizen: bool
    home: Location
    desired_salary_min: float | None = None
    preferred_categories: set[str] = field(default_factory=set)
    preferred_job_types: set[str] = field(default_factory=set)
    profile_text: str = ""

    def __post_init__(self):
        self.skills = set(self.skills)
        if not self.profile_text:
            self.profile_text = " ".join(sorted(self.skills)) or "job seeker"

    def to_json(self) -> dict:
        return {
            "user_id": self.user_id,
            "skills": sorted(self.skills),
            "education_level": self.education_level,
            "age": self.age,
            "citizen": self.citizen,
            "home": {"name": self.home.name, "lat": self.home.lat, "lon": self.home.lon},
            "desired_salary_min": self.desired_salary_min,
            "preferred_categories": sorted(self.preferred_categories),
            "preferred_job_types": sorted(self.preferred_job_types),
            "profile_text": self.profile_text,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CandidateProfile":
        return cls(
            user_id=obj["user_id"],
            skills=set(obj.get("skills", [])),
            education_level=obj.get("education_level", 0),
            age=obj.get("age", 18),
            citizen=obj.get("citizen", True),
            home=Location(**obj["home"]),
            desired_salary_min=obj.get("desired_salary_min"),
            preferred_categories=set(obj.get("preferred_categories", [])),
            preferred_job_types=set(obj.get("preferred_job_types", [])),
            profile_text=obj.get("profile_text", ""),
        )


@dataclass
class ScoredJob:
    job_id: str
    s_sem: float
    s_skill: float
    s_loc: float
    s_sal: float
    s_rec: float
    eligible: bool
    relevance: float
    p_apply: float
    category: str = ""
    location_name: str = ""
    department: str = ""

    def components(self) -> dict[str, float]:
        return {
            "s_sem": self.s_sem,
            "s_skill": self.s_skill,
            "s_loc": self.s_loc,
            "s_sal": self.s_sal,
            "s_rec": self.s_rec,
        }

    def explanation(self, weights: "RankWeights") -> dict:
        return {
            "components": self.components(),
            "weights": {
                "s_sem": weights.w_sem,
                "s_skill": weights.w_skill,
                "s_loc": weights.w_loc,
                "s_sal": weights.w_sal,
                "s_rec": weights.w_rec,
            },
            "relevance": self.relevance,
            "p_apply": self.p_apply,
        }


@dataclass
class RankWeights:
    w_sem: float = 0.25
    w_skill: float = 0.35
    w_loc: float = 0.15
    w_sal: float = 0.10
    w_rec: float = 0.15
    lambda_div: float = 0.05
    beta: np.ndarray = field(default_factory=lambda: _default_beta().copy())

    def __post_init__(self):
        self.beta = np.asarray(self.beta, dtype=np.float64)
        w = self.component_weights
        if any(x < 0 for x in w):
            raise ValueError("component weights must be nonnegative")
        if abs(sum(w) - 1.0) > 1e-9:
            raise ValueError(f"component weights must sum to 1, got {sum(w)}")

    @property
    def component_weights(self) -> tuple[float, float, float, float, float]:
        return (self.w_sem, self.w_skill, self.w_loc, self.w_sal, self.w_rec)

    def to_json(self) -> dict:
        return {
            "w_sem": self.w_sem,
            "w_skill": self.w_skill,
            "w_loc": self.w_loc,
            "w_sal": self.w_sal,
            "w_rec": self.w_rec,
            "lambda_div": self.lambda_div,
            "beta": [float(b) for b in self.beta],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RankWeights":
        return cls(**{**obj, "beta": np.asarray(obj["beta"], dtype=np.float64)})

    @classmethod
    def load(cls, path: str | Path) -> "RankWeights":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))

    def save(self, path: str | Path):
        Path(path).write_text(json.dumps(self.to_json(), indent=2), encoding="utf-8")


def _default_beta() -> np.ndarray:
    """Coefficients fit offline via fit_beta on the bundled synthetic
    interaction log (synth.interaction_log(seed=20250601, n_rows=1000));
    bias first, then one weight per component score."""
    return np.array([-4.073662, -0.000455, 7.550396, 0.339967, -0.093264, 0.311905])


# --- scoring components ---


def jaccard(a: set[str], b: set[str]) -> float:
    """|a & b| / |a | b|; two empty sets score 0."""
    if not a and not b:
        return 0.0
    a, b = set(a), set(b)
    return len(a & b) / len(a | b)


def haversine_km(a: Location, b: Location) -> float:
    lat1, lon1, lat2, lon2 = map(math.radians, (a.lat, a.lon, b.lat, b.lon))
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def location_score(home: Location, job_location: Location) -> float:
    """1.0 within 50 km, exponential decay (50 km constant) beyond."""
    d = haversine_km(home, job_location)
    if d <= LOCATION_FREE_KM:
        return 1.0
    return math.exp(-(d - LOCATION_FREE_KM) / LOCATION_DECAY_KM)


def recency_score(posted_at: datetime, now: datetime) -> float:
    """Half-life decay: 2^(-age_days / 7)."""
    if posted_at.tzinfo is None:
        posted_at = posted_at.replace(tzinfo=timezone.utc)
    if now.tzinfo is None:
        now = now.replace(tzinfo=timezone.utc)
    age_s = (now - posted_at).total_seconds()
    if age_s < 0:
        raise FuturePostDate(f"{posted_at.isoformat()} is after {now.isoformat()}")
    return 2.0 ** (-(age_s / 86400.0) / RECENCY_HALF_LIFE_DAYS)


def salary_score(profile: CandidateProfile, job: JobPosting) -> float:
    """1.0 when the posting can meet the stated desired minimum (or none is
    stated); otherwise the shortfall ratio."""
    desired = profile.desired_salary_min
    if not desired or job.salary_max >= desired:
        return 1.0
    return max(0.0, job.salary_max / desired)


def check_eligibility(profile: CandidateProfile, job: JobPosting) -> bool:
    return (
        profile.education_level >= job.min_education
        and job.age_range[0] <= profile.age <= job.age_range[1]
        and (profile.citizen or not job.citizenship_required)
    )


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def apply_probability(scored: ScoredJob, beta: np.ndarray) -> float:
    """Logistic model over the five component scores (beta[0] is the bias)."""
    z = float(beta[0]) + float(
        np.dot(
            beta[1:],
            [scored.s_sem, scored.s_skill, scored.s_loc, scored.s_sal, scored.s_rec],
        )
    )
    return _sigmoid(z)


def fit_beta(features: np.ndarray, applied: np.ndarray, l2: float = 1e-4,
             max_iter: int = 50, tol: float = 1e-10) -> np.ndarray:
    """Logistic regression via iteratively reweighted least squares.

    features: (n, 5) component scores; applied: (n,) 0/1 labels.
    Returns beta of length 6 (bias first).
    """
    X = np.column_stack([np.ones(len(features)), np.asarray(features, dtype=np.float64)])
    y = np.asarray(applied, dtype=np.float64)
    beta = np.zeros(X.shape[1])
    for _ in range(max_iter):
        z = X @ beta
        p = 1.0 / (1.0 + np.exp(-np.clip(z, -35, 35)))
        w = np.maximum(p * (1.0 - p), 1e-9)
        grad = X.T @ (y - p) - l2 * beta
        hess = (X.T * w) @ X + l2 * np.eye(X.shape[1])
        step = np.linalg.solve(hess, grad)
        beta = beta + step
        if float(np.max(np.abs(step))) < tol:
            break
    return beta


def load_interaction_log(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Read a JSONL interaction log into (features, labels)."""
    feats, labels = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            feats.append([row["s_sem"], row["s_skill"], row["s_loc"],
                          row["s_sal"], row["s_rec"]])
            labels.append(1.0 if row["applied"] else 0.0)
    return np.asarray(feats, dtype=np.float64), np.asarray(labels, dtype=np.float64)


# --- catalog + pipeline ---


class JobCatalog:
    """Job postings plus a vector index over their embedding text."""

    def __init__(self, embedder=None, index: VectorIndex | None = None):
        self.embedder = embedder or DEFAULT_EMBEDDER
        self.index = index or VectorIndex()
        self._jobs: dict[str, JobPosting] = {}

    def add(self, job: JobPosting):
        vec = self.embedder.embed(job.embedding_text)
        self.index.insert(IndexEntry(id=job.index_id, vector=vec, payload_ref=job.job_id))
        self._jobs[job.job_id] = job

    def remove(self, job_id: str) -> bool:
        job = self._jobs.pop(job_id, None)
        if job is None:
            return False
        self.index.remove(job.index_id)
        return True

    def get(self, job_id: str) -> JobPosting | None:
        return self._jobs.get(job_id)

    def jobs(self) -> list[JobPosting]:
        return list(self._jobs.values())

    def __len__(self) -> int:
        return len(self._jobs)


def retrieve_candidates(
    profile: CandidateProfile, catalog: JobCatalog, limit: int = CANDIDATE_LIMIT
) -> list[tuple[str, float]]:
    """Top-100 candidate job ids by embedding cosine, with s_sem in [0, 1]."""
    if catalog.index is None:
        raise IndexUnavailable("job catalog has no index")
    qvec = catalog.embedder.embed(profile.profile_text)
    hits = catalog.index.search(qvec, limit)
    return [
        (catalog.index.payload_ref(h.id), min(1.0, max(0.0, (h.score + 1.0) / 2.0)))
        for h in hits
    ]


def score_job(
    profile: CandidateProfile,
    job: JobPosting,
    s_sem: float,
    now: datetime,
    weights: RankWeights,
) -> ScoredJob:
    s_skill = jaccard(profile.skills, set(job.required_skills))
    s_loc = location_score(profile.home, job.location)
    s_sal = salary_score(profile, job)
    s_rec = recency_score(job.posted_at, now)
    comps = np.array([s_sem, s_skill, s_loc, s_sal, s_rec])
    relevance = float(np.dot(weights.component_weights, comps))
    scored = ScoredJob(
        job_id=job.job_id,
        s_sem=s_sem,
        s_skill=s_skill,
        s_loc=s_loc,
        s_sal=s_sal,
        s_rec=s_rec,
        eligible=check_eligibility(profile, job),
        relevance=relevance,
        p_apply=0.0,
        category=job.category,
        location_name=job.location.name,
        department=job.department,
    )
    scored.p_apply = apply_probability(scored, weights.beta)
    return scored


def diversify(scored: list[ScoredJob], k: int = 10, lambda_div: float = 0.05) -> list[ScoredJob]:
    """Greedy maximization of sum(p_apply) + lambda * attribute coverage.

    Coverage counts distinct categories, location names and departments in
    the selected set; the objective is monotone submodular, so greedy is a
    (1 - 1/e) approximation. Ties break by higher p_apply, then job_id.
    """
    remaining = list(scored)
    selected: list[ScoredJob] = []
    cats: set[str] = set()
    locs: set[str] = set()
    deps: set[str] = set()
    while remaining and len(selected) < k:
        best = None
        best_key = None
        for job in remaining:
            gain = job.p_apply + lambda_div * (
                (job.category not in cats)
                + (job.location_name not in locs)
                + (job.department not in deps)
            )
            key = (-gain, -job.p_apply, job.job_id)
            if best_key is None or key < best_key:
                best, best_key = job, key
        selected.append(best)
        remaining.remove(best)
        cats.add(best.category)
        locs.add(best.location_name)
        deps.add(best.department)
    return selected


def recommend(
    profile: CandidateProfile,
    catalog: JobCatalog,
    now: datetime | None = None,
    k: int = 10,
    weights: RankWeights | None = None,
) -> list[ScoredJob]:
    """Full pipeline: retrieve, score, hard-filter eligibility, diversify."""
    now = now or datetime.now(timezone.utc)
    weights = weights or RankWeights()
    scored = []
    for job_id, s_sem in retrieve_candidates(profile, catalog):
        job = catalog.get(job_id)
        if job is None:
            continue
        s = score_job(profile, job, s_sem, now, weights)
        if s.eligible:
            scored.append(s)
    return diversify(scored, k=k, lambda_div=weights.lambda_div)
