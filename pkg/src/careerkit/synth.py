"""Seeded synthetic corpora for demos and evaluation.

Everything here is deterministic in the seed: job catalogs with planted
relevant postings for a fixture profile, interaction logs with a planted
application rule, and sentence-like text for index-scale benchmarks.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

import numpy as np

from .recommender import CandidateProfile, JobPosting, Location

T_REF = datetime(2025, 6, 1, tzinfo=timezone.utc)

_DOMAINS = {
    "data": ["python", "sql", "excel", "statistics", "reporting", "dashboards",
             "pandas", "data cleaning"],
    "clerical": ["typing", "filing", "record keeping", "ms office", "data entry",
                 "correspondence", "front desk", "scheduling"],
    "field": ["surveying", "gps", "measurement", "soil testing", "mapping",
              "irrigation", "crop management", "extension work"],
    "technical": ["electrical wiring", "circuit repair", "plc", "motor winding",
                  "transformer maintenance", "safety compliance", "welding",
                  "fitting"],
    "health": ["patient care", "first aid", "injections", "ward management",
               "medical records", "sterilization", "lab sampling", "dressing"],
}

_CITIES = {
    "ludhiana": (30.901, 75.857),
    "amritsar": (31.634, 74.872),
    "jalandhar": (31.326, 75.576),
    "patiala": (30.340, 76.386),
    "bathinda": (30.211, 74.945),
    "chandigarh": (30.733, 76.779),
    "delhi": (28.613, 77.209),
    "mumbai": (19.076, 72.877),
    "chennai": (13.083, 80.270),
    "kolkata": (22.573, 88.364),
    "bengaluru": (12.972, 77.594),
    "hyderabad": (17.385, 78.487),
}

_NEAR_CITIES = ["ludhiana", "jalandhar", "patiala", "chandigarh"]
_FAR_CITIES = ["mumbai", "chennai", "kolkata", "bengaluru", "hyderabad"]


def _city(name: str, rng: np.random.Generator, jitter_deg: float = 0.15) -> Location:
    lat, lon = _CITIES[name]
    return Location(
        name=name,
        lat=float(lat + rng.uniform(-jitter_deg, jitter_deg)),
        lon=float(lon + rng.uniform(-jitter_deg, jitter_deg)),
    )


def planted_corpus(
    seed: int, n_jobs: int = 200, n_planted: int = 20
) -> tuple[list[JobPosting], CandidateProfile, set[str]]:
    """A 200-job catalog where exactly n_planted postings are relevant by
    construction (shared skills, nearby, fresh, eligible) for the returned
    fixture profile. Returns (jobs, profile, planted job ids)."""
    rng = np.random.default_rng(seed)
    domains = list(_DOMAINS)
    domain = domains[int(rng.integers(len(domains)))]
    other_domains = [d for d in domains if d != domain]
    pool = _DOMAINS[domain]

    profile_skills = set(rng.choice(pool, size=5, replace=False).tolist())
    home_city = _NEAR_CITIES[int(rng.integers(len(_NEAR_CITIES)))]
    profile = CandidateProfile(
        user_id=f"user-{seed}",
        skills=profile_skills,
        education_level=4,
        age=26,
        citizen=True,
        home=_city(home_city, rng),
        desired_salary_min=18000,
        profile_text=f"{domain} work experience with " + ", ".join(sorted(profile_skills)),
    )

    jobs: list[JobPosting] = []
    planted: set[str] = set()
    for i in range(n_jobs):
        job_id = f"job-{seed}-{i:03d}"
        if i < n_planted:
            skills = set(
                rng.choice(sorted(profile_skills),
                           size=int(rng.integers(3, 5)), replace=False).tolist()
            )
            skills |= set(rng.choice(pool, size=1).tolist())
            city = home_city
            posted = T_REF - timedelta(days=float(rng.uniform(0, 5)))
            min_edu = int(rng.integers(1, 5))
            age_range = (18, 38)
            salary = (15000, float(rng.uniform(22000, 40000)))
            title = f"{domain} officer grade {int(rng.integers(1, 4))}"
            planted.add(job_id)
        else:
            other = other_domains[int(rng.integers(len(other_domains)))]
            skills = set(rng.choice(_DOMAINS[other],
                                    size=int(rng.integers(2, 5)), replace=False).tolist())
            if rng.random() < 0.15:  # near-miss: one shared skill
                skills.add(sorted(profile_skills)[int(rng.integers(len(profile_skills)))])
            city = _FAR_CITIES[int(rng.integers(len(_FAR_CITIES)))]
            posted = T_REF - timedelta(days=float(rng.uniform(15, 60)))
            min_edu = int(rng.integers(1, 7))
            age_range = (18, 35) if rng.random() < 0.8 else (30, 45)
            salary = (8000, float(rng.uniform(12000, 30000)))
            title = f"{other} assistant grade {int(rng.integers(1, 4))}"
        jobs.append(
            JobPosting(
                job_id=job_id,
                title=title,
                description=f"{title} position requiring " + ", ".join(sorted(skills)),
                category=domain if job_id in planted else title.split()[0],
                department=f"department of {title.split()[0]} services",
                location=_city(city, rng),
                salary_min=salary[0],
                salary_max=salary[1],
                required_skills=frozenset(skills),
                min_education=min_edu,
                age_range=age_range,
                citizenship_required=bool(rng.random() < 0.5),
                posted_at=posted,
            )
        )
    return jobs, profile, planted


def interaction_log(seed: int, n_rows: int = 1000, noise: float = 0.10) -> tuple[np.ndarray, np.ndarray]:
    """Synthetic (features, applied) pairs with the planted rule
    applied <=> s_skill > 0.5, flipped with the given noise rate."""
    rng = np.random.default_rng(seed)
    feats = rng.uniform(0.0, 1.0, size=(n_rows, 5))
    labels = (feats[:, 1] > 0.5).astype(np.float64)
    flip = rng.random(n_rows) < noise
    labels[flip] = 1.0 - labels[flip]
    return feats, labels


def write_interaction_log(path, feats: np.ndarray, labels: np.ndarray):
    """Serialize a log in the JSONL wire format used for training."""
    import json

    with open(path, "w", encoding="utf-8") as fh:
        for i, (f, y) in enumerate(zip(feats, labels)):
            fh.write(
                json.dumps(
                    {
                        "user_id": f"u{i % 50}",
                        "job_id": f"j{i}",
                        "s_sem": round(float(f[0]), 6),
                        "s_skill": round(float(f[1]), 6),
                        "s_loc": round(float(f[2]), 6),
                        "s_sal": round(float(f[3]), 6),
                        "s_rec": round(float(f[4]), 6),
                        "applied": bool(y),
                    }
                )
                + "\n"
            )


def question_bank(seed: int, per_topic: int = 40, descriptive_per_topic: int = 4):
    """Synthetic parsed question bank with known topics and varied
    difficulty, for assembly property tests and demos."""
    from .mocktest import Question, QuestionKind, Topic, estimate_difficulty
    from .embedding import DEFAULT_EMBEDDER

    rng = np.random.default_rng(seed)
    nouns = [
        "train", "boat", "tank", "garden", "ladder", "bridge", "orchard",
        "pump", "mill", "canal", "truck", "kite", "well", "farm", "shop",
        "factory", "school", "library", "stadium", "market", "tricycle",
        "granary", "tractor", "loom", "furnace", "windmill", "jetty",
        "quarry", "dam", "hangar",
    ]
    words = [
        "abundant", "brisk", "candid", "dormant", "eager", "frugal", "gentle",
        "hostile", "idle", "jovial", "keen", "lucid", "meek", "noble",
        "obscure", "placid", "quaint", "rigid", "sober", "tranquil", "vivid",
        "wary", "zealous", "austere", "benign", "crafty", "devout", "earnest",
        "fickle", "grim", "humble", "inert", "jaded", "kindly", "livid",
        "morose", "nimble", "opaque", "prudent", "quirky",
    ]
    places = [
        "ludhiana", "amritsar", "patiala", "bathinda", "mohali", "sangrur",
        "moga", "ferozepur", "hoshiarpur", "gurdaspur", "kapurthala", "ropar",
        "faridkot", "mansa", "barnala", "pathankot", "muktsar", "fazilka",
        "nawanshahr", "tarn taran",
    ]
    offices = [
        "water board", "power utility", "transport authority", "health mission",
        "sports council", "literacy drive", "road agency", "census office",
        "tax tribunal", "food commission", "skill mission", "housing board",
        "tourism body", "forest panel", "labour bureau", "port trust",
        "rail division", "dairy federation", "seed agency", "mining cell",
    ]
    tasks = [
        "organising a village job fair", "maintaining a daily cash register",
        "conducting a crop survey", "preparing an office duty roster",
        "handling a public grievance desk", "auditing a ration store",
        "running a vaccination camp", "planning a road repair schedule",
        "allotting stalls at a weekly market", "recording rainfall data",
        "verifying pension documents", "stocking a village library",
        "inspecting a grain warehouse", "mapping street lighting faults",
        "arranging a blood donation drive", "scheduling bus route trials",
        "compiling a voter awareness report", "renewing shop licences",
        "tracking scholarship applications", "clearing encroached footpaths",
    ]

    def distinct_pairs(pool_a, pool_b, n):
        combos = [(a, b) for a in range(len(pool_a)) for b in range(len(pool_b))]
        picks = rng.choice(len(combos), size=min(n, len(combos)), replace=False)
        return [(pool_a[combos[p][0]], pool_b[combos[p][1]]) for p in picks]

    def math_text(i, pair):
        noun, other = pair
        style = i % 4
        a, b = 40 + int(rng.integers(5, 95)), int(rng.integers(2, 15))
        if style == 0:
            return (f"A {noun} costs {a * 7} rupees and is sold at a profit of "
                    f"{5 + (i % 30)} percent. Calculate the selling price.")
        if style == 1:
            return (f"The average weight of {b} crates near the {noun} is {a} kg. "
                    f"Calculate the total weight they place on the {other}.")
        if style == 2:
            return (f"A {noun} travels {a * 3} km in {b} hours towards the {other}. "
                    f"Calculate its speed in km per hour.")
        return (f"Simple interest on {a * 100} rupees at {b}% per year buys a "
                f"{noun}. Calculate the interest after {1 + i % 5} years.")

    def english_text(i, pair):
        word, noun = pair
        style = i % 3
        if style == 0:
            return f"Choose the synonym of '{word}' describing the {noun}."
        if style == 1:
            return f"Choose the antonym of '{word}' in the sentence about the {noun}."
        return f"Pick the word closest in meaning to '{word}' for the {noun} passage."

    def reasoning_text(i, pair):
        noun, other = pair
        a, d = int(rng.integers(2, 30)), int(rng.integers(2, 12))
        style = i % 3
        if style == 0:
            return (f"What comes next in the series {a}, {a + d}, {a + 2 * d}, "
                    f"{a + 3 * d} painted on the {noun}?")
        if style == 1:
            return (f"Find the odd one out: {noun}, {other}, "
                    f"{words[int(rng.integers(len(words)))]}, number {a}.")
        return (f"If {noun.upper()} is coded by shifting each letter {d % 4 + 1} "
                f"ahead, decode the word for the {other}.")

    def gk_text(i, pair):
        place, noun = pair
        style = i % 3
        if style == 0:
            return f"Which is the largest {noun} of the {place} region by area?"
        if style == 1:
            return f"Which river is closest to the famous {noun} of {place}?"
        return f"The historic {noun} of {place} is known as the first of its kind in which state?"

    def ca_text(i, pair):
        place, office = pair
        style = i % 3
        if style == 0:
            return f"Who was recently appointed head of the {place} {office}?"
        if style == 1:
            return f"Which scheme was launched this year by the {office} in {place}?"
        return f"The {office} of {place} recently won which national award?"

    plans = [
        (Topic.MATH, math_text, distinct_pairs(nouns, nouns[::-1], per_topic)),
        (Topic.ENGLISH, english_text, distinct_pairs(words, nouns, per_topic)),
        (Topic.REASONING, reasoning_text, distinct_pairs(nouns, nouns[::-1], per_topic)),
        (Topic.GK, gk_text, distinct_pairs(places, nouns, per_topic)),
        (Topic.CURRENT_AFFAIRS, ca_text, distinct_pairs(places, offices, per_topic)),
    ]
    bank = []
    counter = 0
    for topic, make, pairs in plans:
        for i in range(per_topic):
            text = make(i, pairs[i])
            stats = None
            if rng.random() < 0.6:
                attempts = int(rng.integers(20, 200))
                stats = {
                    "attempts": attempts,
                    "correct": int(rng.integers(0, attempts + 1)),
                }
            options = [f"option {chr(65 + j)}{i}" for j in range(4)]
            bank.append(
                Question(
                    q_id=f"s{counter:04d}",
                    text=text,
                    kind=QuestionKind.MCQ,
                    options=options,
                    answer_key="ABCD"[int(rng.integers(4))],
                    topic=topic,
                    difficulty=estimate_difficulty(text, stats),
                    embedding=DEFAULT_EMBEDDER.embed(text),
                    stats=stats,
                )
            )
            counter += 1
        for i in range(descriptive_per_topic):
            text = (
                f"Describe the steps involved in {tasks[(counter + i) % len(tasks)]} "
                f"and relate them to {topic.value} preparation for the "
                f"{places[(counter * 3 + i) % len(places)]} district."
            )
            bank.append(
                Question(
                    q_id=f"s{counter:04d}",
                    text=text,
                    kind=QuestionKind.DESCRIPTIVE,
                    topic=topic,
                    difficulty=estimate_difficulty(text),
                    embedding=DEFAULT_EMBEDDER.embed(text),
                )
            )
            counter += 1
    return bank


def sentence_corpus(seed: int, n: int, vocab_size: int = 3000, n_topics: int = 40) -> list[str]:
    """Sentence-like word salads with topic structure; embedding them gives
    vectors distributed like the production chunk index."""
    rng = np.random.default_rng(seed)
    vocab = [f"word{i}" for i in range(vocab_size)]
    topics = [
        [vocab[j] for j in rng.choice(vocab_size, size=120, replace=False)]
        for _ in range(n_topics)
    ]
    out = []
    for _ in range(n):
        topic = topics[int(rng.integers(n_topics))]
        n_words = int(rng.integers(8, 40))
        ranks = rng.zipf(1.3, size=n_words)
        words = []
        for z in ranks:
            pool = topic if rng.random() < 0.8 else vocab
            words.append(pool[int(min(z - 1, len(pool) - 1)) % len(pool)])
        out.append(" ".join(words))
    return out
