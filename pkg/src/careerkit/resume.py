"""Resume parsing: section segmentation, contact/education/experience
extraction, skill normalization against a canonical lexicon.

Input is extracted plain text (PDF/DOCX/OCR extraction is a separate,
pluggable concern). Section detection tries explicit headers first and
falls back to a positional split plus a transparent keyword scorer for
headerless resumes. Every low-confidence or failed extraction surfaces as
a warning instead of an error; parse_resume never raises on arbitrary
unicode input.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

from .errors import EmptyText, LexiconMissing

# --- lexicon ---


class SkillLexicon:
    """Canonical skill ids plus a case-insensitive surface-form map.

    File format (UTF-8, tab-separated):
        canonical_id<TAB>category<TAB>surface1|surface2|...
    """

    def __init__(self):
        self.categories: dict[str, str] = {}
        self._surfaces: dict[str, str] = {}
        self._max_surface_tokens = 1

    @classmethod
    def from_file(cls, path) -> "SkillLexicon":
        lex = cls()
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) < 2:
                    continue
                canonical, category = parts[0].strip(), parts[1].strip()
                surfaces = parts[2].split("|") if len(parts) > 2 else []
                lex.add(canonical, category, surfaces)
        return lex

    @classmethod
    def bundled(cls) -> "SkillLexicon":
        ref = resources.files("careerkit").joinpath("data/skills.tsv")
        with resources.as_file(ref) as path:
            return cls.from_file(path)

    def add(self, canonical: str, category: str, surfaces: list[str]):
        canonical = canonical.strip().lower()
        self.categories[canonical] = category
        for surface in [canonical, *surfaces]:
            surface = surface.strip().lower()
            if surface:
                self._surfaces[surface] = canonical
                self._max_surface_tokens = max(
                    self._max_surface_tokens, len(surface.split())
                )

    def __len__(self) -> int:
        return len(self.categories)

    def lookup(self, surface: str) -> str | None:
        return self._surfaces.get(surface.strip().lower())

    def lookup_versioned(self, surface: str) -> str | None:
        """Lookup with the version-strip rule: trailing digit/dot runs after
        a known surface are ignored ('python 3.11' -> 'python')."""
        hit = self.lookup(surface)
        if hit:
            return hit
        stripped = re.sub(r"[\s]*[vV]?[\d][\d.]*$", "", surface.strip())
        if stripped and stripped != surface.strip():
            return self.lookup(stripped)
        return None

    def normalize(self, text_or_phrases) -> tuple[set[str], list[str]]:
        """Greedy longest-match normalization.

        Accepts raw section text or an iterable of phrases; returns the set
        of canonical ids and warnings for phrases that matched nothing.
        """
        if isinstance(text_or_phrases, str):
            phrases = re.split(r"[,;/•|\n\t()]+", text_or_phrases)
        else:
            phrases = list(text_or_phrases)
        found: set[str] = set()
        warnings: list[str] = []
        for phrase in phrases:
            phrase = phrase.strip(" .:-")
            if not phrase:
                continue
            hit = self.lookup_versioned(phrase)
            if hit:
                found.add(hit)
                continue
            matched_any = False
            tokens = phrase.split()
            i = 0
            while i < len(tokens):
                matched = False
                for width in range(min(self._max_surface_tokens, len(tokens) - i), 0, -1):
                    window = " ".join(tokens[i : i + width])
                    hit = self.lookup_versioned(window)
                    if hit is None and width == 1:
                        # version suffix glued to the token: "python3"
                        hit = self.lookup_versioned(re.sub(r"[\d.]+$", "", window))
                    if hit:
                        found.add(hit)
                        i += width
                        # swallow a following bare version token
                        if i < len(tokens) and re.fullmatch(r"[vV]?[\d][\d.]*", tokens[i]):
                            i += 1
                        matched = True
                        matched_any = True
                        break
                if not matched:
                    i += 1
            if not matched_any:
                warnings.append(f"unknown skill phrase: {phrase!r}")
        return found, warnings


_BUNDLED: SkillLexicon | None = None


def bundled_lexicon() -> SkillLexicon:
    global _BUNDLED
    if _BUNDLED is None:
        try:
            _BUNDLED = SkillLexicon.bundled()
        except (OSError, FileNotFoundError) as exc:
            raise LexiconMissing(str(exc)) from exc
    return _BUNDLED


def normalize_skills(text_or_phrases, lexicon: SkillLexicon | None = None) -> set[str]:
    lex = lexicon or bundled_lexicon()
    skills, _ = lex.normalize(text_or_phrases)
    return skills


# --- section segmentation ---

SECTION_ALIASES = {
    "summary": {
        "summary", "profile", "objective", "career objective", "about", "about me",
        "professional summary",
    },
    "education": {
        "education", "educational qualifications", "academic background", "academics",
        "qualifications", "educational background", "academic qualifications",
    },
    "experience": {
        "experience", "work experience", "employment history", "work history",
        "professional experience", "career history", "internships",
    },
    "skills": {
        "skills", "technical skills", "key skills", "core competencies", "skill set",
        "competencies", "skills and abilities", "it skills",
    },
    "projects": {"projects", "academic projects", "personal projects", "key projects"},
    "certifications": {
        "certifications", "certificates", "courses", "training", "licenses",
    },
    "languages": {"languages", "languages known", "language proficiency"},
    "achievements": {"achievements", "awards", "honors", "accomplishments"},
    "references": {"references", "referees"},
    "contact": {
        "contact", "contact information", "contact details", "personal information",
        "personal details",
    },
}

_ALIAS_TO_SECTION = {
    alias: section for section, aliases in SECTION_ALIASES.items() for alias in aliases
}

_UNDERLINE = re.compile(r"^[-=_~*]{3,}\s*$")

# keyword weights for the headerless fallback classifier
SECTION_KEYWORDS: dict[str, dict[str, float]] = {
    "education": {
        "university": 2.0, "college": 2.0, "institute": 2.0, "school": 1.0,
        "bachelor": 2.0, "master": 2.0, "degree": 2.0, "diploma": 2.0,
        "cgpa": 2.0, "gpa": 2.0, "percentage": 1.0, "matriculation": 2.0,
        "graduated": 1.5, "b.tech": 2.0, "m.tech": 2.0, "mba": 2.0, "b.sc": 2.0,
    },
    "experience": {
        "worked": 2.0, "working": 1.0, "company": 1.5, "responsible": 2.0,
        "managed": 1.5, "developed": 1.0, "intern": 2.0, "present": 1.0,
        "pvt": 1.5, "ltd": 1.5, "team": 0.5, "role": 1.0, "handled": 1.5,
    },
    "skills": {
        "proficient": 2.0, "familiar": 1.5, "knowledge": 1.0, "tools": 1.5,
        "technologies": 2.0, "software": 1.0,
    },
}


def _header_section(line: str) -> str | None:
    stripped = line.strip().strip(":").strip()
    if not stripped or len(stripped.split()) > 4:
        return None
    return _ALIAS_TO_SECTION.get(stripped.lower())


def _classify_paragraph(paragraph: str) -> str:
    text = paragraph.lower()
    words = text.split()
    scores = {}
    for section, weights in SECTION_KEYWORDS.items():
        scores[section] = sum(w for kw, w in weights.items() if kw in text)
    # dense comma-separated short phrases look like a skills list
    commas = paragraph.count(",") + paragraph.count("|")
    if words:
        scores["skills"] += min(2.0, 0.4 * commas * min(1.0, 12 / max(len(words), 1)))
    best = max(scores, key=lambda s: (scores[s], s))
    return best if scores[best] > 0 else "unclassified"


def segment_sections(text: str) -> dict[str, str]:
    """Split resume text into named sections.

    Header lines win when present; otherwise the first lines become the
    contact block and remaining paragraphs are classified by the keyword
    scorer. Degenerate inputs land in a single "unclassified" section.
    """
    if not text or not text.strip():
        raise EmptyText("cannot segment empty text")
    lines = text.splitlines()
    sections: dict[str, list[str]] = {}
    current = "contact"
    saw_header = False
    for i, line in enumerate(lines):
        if _UNDERLINE.match(line):
            continue
        name = _header_section(line)
        if name:
            current = name
            saw_header = True
            sections.setdefault(current, [])
            continue
        sections.setdefault(current, []).append(line)
    if saw_header:
        return {
            name: "\n".join(body).strip()
            for name, body in sections.items()
            if "\n".join(body).strip() or name != "contact"
        }

    # headerless fallback
    nonempty = [ln for ln in lines if ln.strip()]
    has_contact_signal = bool(
        EMAIL_RE.search(text) or PHONE_RE.search(text)
    )
    if len(nonempty) <= 2 and not has_contact_signal:
        return {"unclassified": text.strip()}
    # contact block: the opening lines, ending at the first blank, max 8
    cut = min(8, len(lines))
    for i, line in enumerate(lines[:8]):
        if not line.strip():
            cut = i
            break
    contact_lines = lines[:cut]
    rest = "\n".join(lines[cut:])
    out = {"contact": "\n".join(contact_lines).strip()}
    for paragraph in re.split(r"\n\s*\n", rest):
        if not paragraph.strip():
            continue
        label = _classify_paragraph(paragraph)
        out[label] = (out.get(label, "") + "\n\n" + paragraph.strip()).strip()
    return out


# --- contact extraction ---

EMAIL_RE = re.compile(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}")
PHONE_RE = re.compile(r"(?:\+\s?91[\s.-]?)?(?:\(?0\)?[\s.-]?)?\d{5}[\s.-]?\d{5}")
_PIN_RE = re.compile(r"\b\d{6}\b")


def normalize_phone(raw: str) -> str | None:
    digits = re.sub(r"\D", "", raw)
    if len(digits) == 10:
        return "+91" + digits
    if len(digits) == 11 and digits.startswith("0"):
        return "+91" + digits[1:]
    if len(digits) == 12 and digits.startswith("91"):
        return "+" + digits
    return None


@dataclass
class Contact:
    name: str | None = None
    email: str | None = None
    phone: str | None = None
    address: str | None = None

    def to_json(self) -> dict:
        return {"name": self.name, "email": self.email, "phone": self.phone,
                "address": self.address}


def extract_contact(section_text: str) -> tuple[Contact, list[str]]:
    """Email and phone by pattern, name positionally; missing fields are
    None plus a warning."""
    warnings: list[str] = []
    contact = Contact()
    m = EMAIL_RE.search(section_text)
    if m:
        contact.email = m.group()
    else:
        warnings.append("no email found")
    m = PHONE_RE.search(section_text)
    if m:
        contact.phone = normalize_phone(m.group())
    if contact.phone is None:
        warnings.append("no phone found")

    label = re.search(r"(?im)^\s*address\s*[:\-]\s*(.+)$", section_text)
    if label:
        contact.address = label.group(1).strip()
    else:
        for line in section_text.splitlines():
            if _PIN_RE.search(line) and not PHONE_RE.search(line):
                contact.address = line.strip()
                break

    for line in section_text.splitlines()[:6]:
        stripped = line.strip()
        if not stripped or "@" in stripped:
            continue
        if PHONE_RE.search(stripped) or _PIN_RE.search(stripped):
            continue
        lowered = stripped.lower()
        if lowered.startswith(("address", "phone", "email", "mobile", "tel")):
            continue
        if _header_section(stripped):
            continue
        words = stripped.replace("|", " ").split()
        if 1 <= len(words) <= 5 and all(
            re.fullmatch(r"[A-Za-z][A-Za-z.'-]*", w) for w in words
        ):
            contact.name = stripped
            break
    if contact.name is None:
        warnings.append("no name found")
    return contact, warnings


# --- education ---

DEGREE_RE = re.compile(
    r"(?i)\b("
    r"b\.?\s?tech|m\.?\s?tech|b\.?\s?e|m\.?\s?e|b\.?\s?sc|m\.?\s?sc|"
    r"b\.?\s?a|m\.?\s?a|b\.?\s?com|m\.?\s?com|bba|mba|bca|mca|ph\.?\s?d|"
    r"bachelor of [a-z ]+?|master of [a-z ]+?|diploma(?: in [a-z ]+?)?|iti|"
    r"matriculation|senior secondary|higher secondary|12th|10th"
    r")\b(?=[\s,.(]|$)"
)
_YEAR_RE = re.compile(r"\b(19[5-9]\d|20[0-4]\d)\b")
_GPA_RE = re.compile(r"(?i)(?:cgpa|gpa)\s*[:\-]?\s*(\d{1,2}(?:\.\d{1,2})?)")
_PERCENT_RE = re.compile(r"(\d{2,3}(?:\.\d{1,2})?)\s*%")
_INSTITUTION_RE = re.compile(
    r"(?i)([A-Za-z][A-Za-z .&'-]*(?:university|college|institute|school|academy|polytechnic)(?: of [A-Za-z ]+?(?=,|;|\(|\d|$))?)"
)


@dataclass
class EducationEntry:
    degree: str
    institution: str | None = None
    year: int | None = None
    gpa: float | None = None

    def to_json(self) -> dict:
        return {"degree": self.degree, "institution": self.institution,
                "year": self.year, "gpa": self.gpa}


def extract_education(section_text: str) -> tuple[list[EducationEntry], list[str]]:
    entries: list[EducationEntry] = []
    warnings: list[str] = []
    lines = [ln for ln in section_text.splitlines() if ln.strip()]
    for i, line in enumerate(lines):
        m = DEGREE_RE.search(line)
        if not m:
            continue
        entry = EducationEntry(degree=line[m.start() : m.end()].strip())
        scope = line
        inst = _INSTITUTION_RE.search(scope)
        if not inst and i + 1 < len(lines) and not DEGREE_RE.search(lines[i + 1]):
            scope = scope + "\n" + lines[i + 1]
            inst = _INSTITUTION_RE.search(scope)
        if inst:
            entry.institution = inst.group(1).strip(" ,.-")
        year = _YEAR_RE.findall(scope)
        if year:
            entry.year = int(year[-1])
        gpa = _GPA_RE.search(scope)
        if gpa:
            entry.gpa = float(gpa.group(1))
        else:
            pct = _PERCENT_RE.search(scope)
            if pct:
                entry.gpa = float(pct.group(1))
        if entry.institution is None:
            warnings.append(f"education entry without institution: {entry.degree!r}")
        entries.append(entry)
    return entries, warnings


# --- experience ---

_MONTHS = {
    "jan": 1, "feb": 2, "mar": 3, "apr": 4, "may": 5, "jun": 6, "jul": 7,
    "aug": 8, "sep": 9, "sept": 9, "oct": 10, "nov": 11, "dec": 12,
    "january": 1, "february": 2, "march": 3, "april": 4, "june": 6,
    "july": 7, "august": 8, "september": 9, "october": 10, "november": 11,
    "december": 12,
}

_DATE_TOKEN = r"(?:[A-Za-z]{3,9}\.?\s+\d{4}|\d{1,2}/\d{4}|\d{4}|present|current)"
_DATE_RANGE_RE = re.compile(
    rf"(?i)({_DATE_TOKEN})\s*(?:-|–|—|to)\s*({_DATE_TOKEN})"
)


def parse_date(token: str) -> str | None:
    """Normalize 'MMM YYYY' / 'MM/YYYY' / 'YYYY' / 'Present' to 'YYYY-MM'
    (or 'Present'); anything else is None."""
    token = token.strip().rstrip(".")
    if token.lower() in ("present", "current"):
        return "Present"
    m = re.fullmatch(r"(?i)([A-Za-z]{3,9})\.?\s+(\d{4})", token)
    if m:
        month = _MONTHS.get(m.group(1).lower())
        if month:
            return f"{m.group(2)}-{month:02d}"
        return None
    m = re.fullmatch(r"(\d{1,2})/(\d{4})", token)
    if m and 1 <= int(m.group(1)) <= 12:
        return f"{m.group(2)}-{int(m.group(1)):02d}"
    m = re.fullmatch(r"\d{4}", token)
    if m:
        return f"{token}-01"
    return None


@dataclass
class ExperienceEntry:
    company: str | None = None
    title: str | None = None
    start: str | None = None
    end: str | None = None
    bullets: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"company": self.company, "title": self.title, "start": self.start,
                "end": self.end, "bullets": list(self.bullets)}


def extract_experience(section_text: str) -> tuple[list[ExperienceEntry], list[str]]:
    entries: list[ExperienceEntry] = []
    warnings: list[str] = []
    for block in re.split(r"\n\s*\n", section_text):
        lines = [ln for ln in block.splitlines() if ln.strip()]
        if not lines:
            continue
        head = lines[0].strip()
        entry = ExperienceEntry()
        m = _DATE_RANGE_RE.search(head)
        if m:
            entry.start = parse_date(m.group(1))
            entry.end = parse_date(m.group(2))
            if entry.start is None or entry.end is None:
                warnings.append(f"unparseable date range in: {head!r}")
            head = (head[: m.start()] + head[m.end() :]).strip(" ,|-—–()")
        parts = re.split(r"(?i)\s+at\s+", head, maxsplit=1)
        if len(parts) == 2:
            entry.title, entry.company = parts[0].strip(" ,"), parts[1].strip(" ,|()")
        else:
            parts = re.split(r"\s*[,|]\s*|\s+[-—–]\s+", head, maxsplit=1)
            if len(parts) == 2:
                entry.title, entry.company = parts[0].strip(), parts[1].strip(" ,|()")
            else:
                entry.title = head.strip() or None
                warnings.append(f"experience block without company: {head!r}")
        for line in lines[1:]:
            stripped = line.strip()
            if stripped.startswith(("-", "•", "*")):
                entry.bullets.append(stripped.lstrip("-•* ").strip())
            elif entry.start is None and _DATE_RANGE_RE.search(stripped):
                m2 = _DATE_RANGE_RE.search(stripped)
                entry.start = parse_date(m2.group(1))
                entry.end = parse_date(m2.group(2))
            else:
                entry.bullets.append(stripped)
        if entry.title or entry.company or entry.bullets:
            entries.append(entry)
    return entries, warnings


# --- whole-resume parsing ---


@dataclass
class ParsedResume:
    contact: Contact
    education: list[EducationEntry]
    experience: list[ExperienceEntry]
    skills: set[str]
    warnings: list[str]

    def to_json(self) -> dict:
        return {
            "contact": self.contact.to_json(),
            "education": [e.to_json() for e in self.education],
            "experience": [e.to_json() for e in self.experience],
            "skills": sorted(self.skills),
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ParsedResume":
        return cls(
            contact=Contact(**obj.get("contact", {})),
            education=[EducationEntry(**e) for e in obj.get("education", [])],
            experience=[
                ExperienceEntry(
                    company=e.get("company"), title=e.get("title"),
                    start=e.get("start"), end=e.get("end"),
                    bullets=list(e.get("bullets", [])),
                )
                for e in obj.get("experience", [])
            ],
            skills=set(obj.get("skills", [])),
            warnings=list(obj.get("warnings", [])),
        )


def parse_resume(text: str, lexicon: SkillLexicon | None = None) -> ParsedResume:
    """Segment, extract per section, and normalize skills."""
    if not text or not text.strip():
        raise EmptyText("cannot parse empty resume text")
    lex = lexicon or bundled_lexicon()
    sections = segment_sections(text)
    warnings: list[str] = []

    contact_text = sections.get("contact", "")
    if not contact_text:
        # fall back to the opening lines when a labeled section is absent
        contact_text = "\n".join(text.splitlines()[:8])
    contact, w = extract_contact(contact_text)
    warnings.extend(w)

    education: list[EducationEntry] = []
    for name in ("education", "certifications"):
        if name in sections and name == "education":
            entries, w = extract_education(sections[name])
            education.extend(entries)
            warnings.extend(w)

    experience: list[ExperienceEntry] = []
    if "experience" in sections:
        experience, w = extract_experience(sections["experience"])
        warnings.extend(w)

    skills: set[str] = set()
    if "skills" in sections:
        skills, w = lex.normalize(sections["skills"])
        warnings.extend(w)

    return ParsedResume(
        contact=contact,
        education=education,
        experience=experience,
        skills=skills,
        warnings=warnings,
    )


def render_resume(parsed: ParsedResume) -> str:
    """Deterministic plain-text rendering of a parsed resume; parsing the
    rendering reproduces the same skills and contact."""
    lines: list[str] = []
    if parsed.contact.name:
        lines.append(parsed.contact.name)
    if parsed.contact.email:
        lines.append(f"Email: {parsed.contact.email}")
    if parsed.contact.phone:
        lines.append(f"Phone: {parsed.contact.phone}")
    if parsed.contact.address:
        lines.append(f"Address: {parsed.contact.address}")
    if parsed.education:
        lines += ["", "EDUCATION"]
        for e in parsed.education:
            bits = [e.degree]
            if e.institution:
                bits.append(e.institution)
            if e.year:
                bits.append(str(e.year))
            line = ", ".join(bits)
            if e.gpa is not None:
                line += f" CGPA: {e.gpa}"
            lines.append(line)
    if parsed.experience:
        lines += ["", "WORK EXPERIENCE"]
        for x in parsed.experience:
            head = x.title or "worker"
            if x.company:
                head += f" at {x.company}"
            if x.start and x.end:
                start = x.start if x.start == "Present" else f"{int(x.start[5:7]):02d}/{x.start[:4]}"
                end = x.end if x.end == "Present" else f"{int(x.end[5:7]):02d}/{x.end[:4]}"
                head += f" ({start} - {end})"
            lines.append(head)
            for b in x.bullets:
                lines.append(f"- {b}")
            lines.append("")
    if parsed.skills:
        lines += ["", "SKILLS", ", ".join(sorted(parsed.skills))]
    return "\n".join(lines).strip() + "\n"


# --- evaluation against gold labels ---


def _norm_value(v):
    if isinstance(v, str):
        return " ".join(v.lower().split())
    return v


def field_scores(parsed: ParsedResume, gold: dict) -> dict[str, tuple[int, int, int]]:
    """(tp, fp, fn) per field family against a gold ParsedResume JSON."""
    scores: dict[str, tuple[int, int, int]] = {}

    def add(name, tp, fp, fn):
        scores[name] = (tp, fp, fn)

    gc = gold.get("contact", {})
    tp = fp = fn = 0
    for key in ("name", "email", "phone"):
        got = _norm_value(getattr(parsed.contact, key))
        want = _norm_value(gc.get(key))
        if want is None:
            if got is not None:
                fp += 1
        elif got == want:
            tp += 1
        else:
            fn += 1
            if got is not None:
                fp += 1
    add("contact", tp, fp, fn)

    for family, got_items, want_items, keys in (
        (
            "education",
            [e.to_json() for e in parsed.education],
            gold.get("education", []),
            ("degree", "institution", "year", "gpa"),
        ),
        (
            "experience",
            [e.to_json() for e in parsed.experience],
            gold.get("experience", []),
            ("company", "title", "start", "end"),
        ),
    ):
        tp = fp = fn = 0
        got_fields = {
            (i, k, _norm_value(item.get(k)))
            for i, item in enumerate(got_items)
            for k in keys
            if item.get(k) is not None
        }
        want_fields = {
            (i, k, _norm_value(item.get(k)))
            for i, item in enumerate(want_items)
            for k in keys
            if item.get(k) is not None
        }
        tp = len(got_fields & want_fields)
        fp = len(got_fields - want_fields)
        fn = len(want_fields - got_fields)
        add(family, tp, fp, fn)

    got_sk = set(parsed.skills)
    want_sk = set(gold.get("skills", []))
    add("skills", len(got_sk & want_sk), len(got_sk - want_sk), len(want_sk - got_sk))
    return scores


def micro_f1(score_list: list[dict[str, tuple[int, int, int]]]) -> float:
    tp = fp = fn = 0
    for scores in score_list:
        for t, p, n in scores.values():
            tp += t
            fp += p
            fn += n
    if tp == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2 * precision * recall / (precision + recall)


def contact_accuracy(parsed_list: list[ParsedResume], golds: list[dict]) -> float:
    """Fraction of (name, email, phone) fields matching gold exactly."""
    correct = total = 0
    for parsed, gold in zip(parsed_list, golds):
        gc = gold.get("contact", {})
        for key in ("name", "email", "phone"):
            total += 1
            if _norm_value(getattr(parsed.contact, key)) == _norm_value(gc.get(key)):
                correct += 1
    return correct / total if total else 0.0
