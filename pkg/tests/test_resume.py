import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from careerkit.errors import EmptyText
from careerkit.resume import (
    Contact,
    SkillLexicon,
    bundled_lexicon,
    contact_accuracy,
    extract_contact,
    extract_education,
    extract_experience,
    field_scores,
    micro_f1,
    normalize_phone,
    normalize_skills,
    parse_date,
    parse_resume,
    render_resume,
    segment_sections,
)

FIXTURES = Path(__file__).parent / "fixtures" / "resumes"


def load_fixture(i):
    text = (FIXTURES / f"resume_{i:02d}.txt").read_text(encoding="utf-8")
    gold = json.loads((FIXTURES / f"gold_{i:02d}.json").read_text(encoding="utf-8"))
    return text, gold


# --- segmentation ---

def test_segment_explicit_headers():
    text = "Ravi Kumar\n\nEDUCATION\nB.Tech, Panjab University, 2020\n\nSKILLS\nPython, SQL"
    sections = segment_sections(text)
    assert "education" in sections
    assert "skills" in sections
    assert sections["education"].startswith("B.Tech")
    assert sections["skills"] == "Python, SQL"


def test_segment_colon_and_underline_headers():
    text = (
        "Neha Sharma\n\nSkills:\nTyping, Tally\n\nEducation\n---------\n"
        "B.Com, DAV College, 2019"
    )
    sections = segment_sections(text)
    assert sections["skills"] == "Typing, Tally"
    assert "B.Com" in sections["education"]


def test_segment_headerless_fallback():
    text, _ = load_fixture(9)  # generated headerless variant
    sections = segment_sections(text)
    assert "contact" in sections
    assert len([s for s in sections if s != "contact"]) >= 1


def test_segment_degenerate_single_word():
    assert segment_sections("hello") == {"unclassified": "hello"}


def test_segment_empty_raises():
    with pytest.raises(EmptyText):
        segment_sections("  \n ")


# --- contact ---

def test_email_extracted_exactly():
    contact, _ = extract_contact("reach me: a.b@x.co thanks")
    assert contact.email == "a.b@x.co"


def test_phone_normalization():
    contact, _ = extract_contact("Simran Kaur\n+91 98765 43210")
    assert contact.phone == "+919876543210"
    assert normalize_phone("098765 43210") == "+919876543210"
    assert normalize_phone("98765-43210") == "+919876543210"
    assert normalize_phone("12345") is None


def test_missing_phone_warns():
    contact, warnings = extract_contact("Ravi Kumar\nravi@example.com")
    assert contact.phone is None
    assert any("phone" in w for w in warnings)


def test_name_skips_email_and_phone_lines():
    contact, _ = extract_contact("ravi@example.com\n98765 43210\nRavi Kumar")
    assert contact.name == "Ravi Kumar"


# --- skills ---

def test_js_synonym():
    assert normalize_skills(["JS"]) == {"javascript"}


def test_version_strip():
    assert normalize_skills(["Python 3.11"]) == {"python"}
    assert normalize_skills(["python3"]) == {"python"}
    assert normalize_skills(["Tally ERP 9"]) == {"tally"}


def test_compound_matched_whole():
    skills = normalize_skills("machine learning")
    assert skills == {"machine learning"}


def test_unknown_phrase_warns():
    lex = bundled_lexicon()
    skills, warnings = lex.normalize("Python, Completely Unknown Craft")
    assert skills == {"python"}
    assert len(warnings) == 1


def test_lexicon_case_insensitive():
    lex = bundled_lexicon()
    assert lex.lookup("PYTHON") == "python"
    assert lex.lookup("Ms ExCeL") == "ms excel"


def test_lexicon_custom_file(tmp_path):
    path = tmp_path / "lex.tsv"
    path.write_text("gardening\ttechnical\tgarden work|plant care\n", encoding="utf-8")
    lex = SkillLexicon.from_file(path)
    assert lex.lookup("plant care") == "gardening"
    assert len(lex) == 1


def test_skills_always_canonical():
    lex = bundled_lexicon()
    canonical = set(lex.categories)
    for i in range(0, 50, 7):
        text, _ = load_fixture(i)
        parsed = parse_resume(text)
        assert parsed.skills <= canonical


# --- education / experience ---

def test_education_entry_fields():
    entries, _ = extract_education("B.Tech, Punjab Technical University, 2019 CGPA: 8.2")
    assert len(entries) == 1
    e = entries[0]
    assert e.degree == "B.Tech"
    assert e.institution == "Punjab Technical University"
    assert e.year == 2019
    assert e.gpa == 8.2


def test_education_percent_marks():
    entries, _ = extract_education("12th, Government College, 2015 (78.5%)")
    assert entries[0].gpa == 78.5
    assert entries[0].year == 2015


def test_experience_at_form():
    entries, _ = extract_experience(
        "Data Analyst at Infotech Solutions Pvt Ltd (Jan 2020 - Present)\n- did things"
    )
    e = entries[0]
    assert e.title == "Data Analyst"
    assert e.company == "Infotech Solutions Pvt Ltd"
    assert e.start == "2020-01"
    assert e.end == "Present"
    assert e.bullets == ["did things"]


def test_experience_comma_form_with_numeric_dates():
    entries, _ = extract_experience("Junior Clerk, Verka Dairy (03/2018 - 11/2020)")
    e = entries[0]
    assert (e.title, e.company) == ("Junior Clerk", "Verka Dairy")
    assert (e.start, e.end) == ("2018-03", "2020-11")


def test_parse_date_forms():
    assert parse_date("Jan 2020") == "2020-01"
    assert parse_date("September 2021") == "2021-09"
    assert parse_date("03/2018") == "2018-03"
    assert parse_date("2019") == "2019-01"
    assert parse_date("Present") == "Present"
    assert parse_date("sometime ago") is None


# --- whole resume ---

def test_fixture_zero_exact_gold():
    text, gold = load_fixture(0)
    parsed = parse_resume(text)
    assert parsed.contact.name == gold["contact"]["name"]
    assert parsed.contact.email == gold["contact"]["email"]
    assert parsed.contact.phone == gold["contact"]["phone"]
    assert [e.to_json() for e in parsed.education] == gold["education"]
    assert parsed.skills == set(gold["skills"])
    got_exp = [
        {k: v for k, v in e.to_json().items() if k != "bullets"}
        for e in parsed.experience
    ]
    assert got_exp == gold["experience"]


def test_empty_resume_raises():
    with pytest.raises(EmptyText):
        parse_resume("")


def test_corpus_micro_f1_and_contact_accuracy():
    parsed_list, golds, scores = [], [], []
    for i in range(50):
        text, gold = load_fixture(i)
        parsed = parse_resume(text)
        parsed_list.append(parsed)
        golds.append(gold)
        scores.append(field_scores(parsed, gold))
    assert micro_f1(scores) >= 0.85
    assert contact_accuracy(parsed_list, golds) >= 0.95


def test_render_parse_idempotent_on_fixtures():
    for i in (0, 3, 14, 25):
        text, _ = load_fixture(i)
        first = parse_resume(text)
        second = parse_resume(render_resume(first))
        assert second.skills == first.skills
        assert second.contact.name == first.contact.name
        assert second.contact.email == first.contact.email
        assert second.contact.phone == first.contact.phone


@given(st.text(min_size=1, max_size=400).filter(lambda s: s.strip()))
@settings(max_examples=300, deadline=None)
def test_parser_total_on_arbitrary_unicode(text):
    parsed = parse_resume(text)
    assert parsed.warnings is not None


def test_extracted_email_phone_satisfy_own_patterns():
    from careerkit.resume import EMAIL_RE

    for i in range(50):
        text, _ = load_fixture(i)
        parsed = parse_resume(text)
        if parsed.contact.email:
            assert EMAIL_RE.fullmatch(parsed.contact.email)
        if parsed.contact.phone:
            assert parsed.contact.phone.startswith("+91")
            assert len(parsed.contact.phone) == 13
