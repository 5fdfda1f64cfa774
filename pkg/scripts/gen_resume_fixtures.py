"""Regenerate the bundled resume fixture corpus (text + gold labels).

Gold labels are derived from the generation parameters, never from running
the parser, so they stay a valid measurement target. Usage:

    python scripts/gen_resume_fixtures.py [output_dir]
"""

import json
import sys
from pathlib import Path

import numpy as np

FIRST = ["Ravi", "Simran", "Harpreet", "Amandeep", "Gurpreet", "Neha", "Rahul",
         "Priya", "Manpreet", "Arjun", "Kiran", "Sunil", "Pooja", "Vikram",
         "Jaspreet", "Anita", "Rajesh", "Navdeep", "Seema", "Karan"]
LAST = ["Kumar", "Kaur", "Singh", "Sharma", "Verma", "Gupta", "Mehta", "Gill",
        "Bajwa", "Sidhu", "Malhotra", "Chawla"]
DOMAINS = ["example.com", "mail.co.in", "jobmail.in"]
CITIES = ["Ludhiana", "Amritsar", "Jalandhar", "Patiala", "Bathinda", "Mohali"]

INSTITUTIONS = [
    "Punjab Technical University", "Guru Nanak Dev University", "Panjab University",
    "Lovely Professional University", "Khalsa College", "DAV College",
    "Government College", "Thapar Institute", "National Institute of Technology",
    "Ramgarhia Polytechnic", "Government Polytechnic College",
]
DEGREES = ["B.Tech", "M.Tech", "B.Sc", "M.Sc", "B.Com", "BBA", "MBA", "BCA",
           "MCA", "Diploma", "ITI", "Matriculation", "12th"]

COMPANIES = ["Infotech Solutions Pvt Ltd", "Verka Dairy", "Bharti Telecom",
             "Sunrise Textiles", "Punjab State Power Corporation",
             "Trident Group", "Hero Cycles", "Avon Fabrication Works"]
TITLES = ["Data Analyst", "Junior Clerk", "Sales Executive", "Lab Technician",
          "Field Officer", "Office Assistant", "Electrician", "Web Developer",
          "Accounts Assistant", "Machine Operator"]

# (canonical_id, [rendered surfaces]) - surfaces the parser's lexicon knows
SKILL_SURFACES = [
    ("python", ["Python", "Python 3.11", "python3"]),
    ("javascript", ["JavaScript", "JS"]),
    ("sql", ["SQL"]),
    ("ms excel", ["MS Excel", "Excel", "Microsoft Excel"]),
    ("ms word", ["MS Word", "Word"]),
    ("machine learning", ["Machine Learning", "ML"]),
    ("data entry", ["Data Entry"]),
    ("typing", ["Typing", "Touch Typing"]),
    ("tally", ["Tally", "Tally ERP 9"]),
    ("accounting", ["Accounting", "Accountancy"]),
    ("communication", ["Communication", "Communication Skills"]),
    ("teamwork", ["Teamwork", "Team Player"]),
    ("leadership", ["Leadership"]),
    ("problem solving", ["Problem Solving"]),
    ("customer service", ["Customer Service", "Customer Support"]),
    ("java", ["Java", "Java 17", "Core Java"]),
    ("react", ["React", "ReactJS"]),
    ("django", ["Django"]),
    ("html", ["HTML", "HTML5"]),
    ("css", ["CSS", "CSS3"]),
    ("autocad", ["AutoCAD", "Auto CAD"]),
    ("electrical wiring", ["Electrical Wiring", "House Wiring"]),
    ("welding", ["Welding", "Arc Welding"]),
    ("patient care", ["Patient Care"]),
    ("nursing", ["Nursing", "Staff Nursing"]),
    ("first aid", ["First Aid"]),
    ("driving", ["Driving", "Light Vehicle Driving"]),
    ("digital marketing", ["Digital Marketing"]),
    ("seo", ["SEO", "Search Engine Optimization"]),
    ("graphic design", ["Graphic Design"]),
    ("adobe photoshop", ["Adobe Photoshop", "Photoshop"]),
    ("payroll", ["Payroll", "Payroll Processing"]),
    ("gst filing", ["GST Filing", "GST Returns"]),
    ("hindi", ["Hindi"]),
    ("punjabi", ["Punjabi"]),
    ("english", ["English", "Spoken English"]),
]

MONTHS = ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep",
          "Oct", "Nov", "Dec"]

BULLETS = [
    "Maintained daily records and registers",
    "Prepared weekly progress reports for the manager",
    "Handled customer queries and complaints",
    "Built dashboards for management reporting",
    "Processed invoices and payment entries",
    "Coordinated with vendors and suppliers",
    "Conducted site visits and inspections",
    "Trained two junior staff members",
]


def pick(rng, pool):
    return pool[int(rng.integers(len(pool)))]


def make_phone(rng):
    digits = "".join(str(int(rng.integers(10))) for _ in range(8))
    ten = f"9{int(rng.integers(6, 10))}{digits}"
    styles = [
        f"+91 {ten[:5]} {ten[5:]}",
        f"+91-{ten[:5]}-{ten[5:]}",
        f"{ten[:5]} {ten[5:]}",
        ten,
        f"0{ten}",
    ]
    return pick(rng, styles), f"+91{ten}"


def make_education(rng, n):
    entries = []
    for _ in range(n):
        degree = pick(rng, DEGREES)
        inst = pick(rng, INSTITUTIONS)
        year = int(rng.integers(2005, 2025))
        style = int(rng.integers(3))
        if style == 0:
            gpa = round(float(rng.uniform(5.5, 9.8)), 1)
            line = f"{degree}, {inst}, {year} CGPA: {gpa}"
        elif style == 1:
            gpa = round(float(rng.uniform(55, 95)), 1)
            line = f"{degree}, {inst}, {year} ({gpa}%)"
        else:
            gpa = None
            line = f"{degree}, {inst}, {year}"
        entries.append((line, {"degree": degree, "institution": inst,
                               "year": year, "gpa": gpa}))
    return entries


def make_experience(rng, n):
    entries = []
    for _ in range(n):
        title = pick(rng, TITLES)
        company = pick(rng, COMPANIES)
        y1 = int(rng.integers(2015, 2023))
        m1 = int(rng.integers(1, 13))
        y2 = y1 + int(rng.integers(1, 4))
        m2 = int(rng.integers(1, 13))
        present = rng.random() < 0.4
        style = int(rng.integers(2))
        if style == 0:
            d1 = f"{MONTHS[m1-1]} {y1}"
            d2 = "Present" if present else f"{MONTHS[m2-1]} {y2}"
        else:
            d1 = f"{m1:02d}/{y1}"
            d2 = "Present" if present else f"{m2:02d}/{y2}"
        head_style = int(rng.integers(2))
        if head_style == 0:
            head = f"{title} at {company} ({d1} - {d2})"
        else:
            head = f"{title}, {company} ({d1} - {d2})"
        bullets = [pick(rng, BULLETS) for _ in range(int(rng.integers(1, 4)))]
        block = head + "\n" + "\n".join(f"- {b}" for b in bullets)
        entries.append(
            (
                block,
                {
                    "company": company,
                    "title": title,
                    "start": f"{y1}-{m1:02d}",
                    "end": "Present" if present else f"{y2}-{m2:02d}",
                },
            )
        )
    return entries


def make_skills(rng, n, with_unknown):
    chosen_idx = rng.choice(len(SKILL_SURFACES), size=n, replace=False)
    surfaces, canon = [], set()
    for i in chosen_idx:
        cid, forms = SKILL_SURFACES[int(i)]
        surfaces.append(pick(rng, forms))
        canon.add(cid)
    if with_unknown:
        surfaces.append("Quantum Basket Weaving")
    return ", ".join(surfaces), canon


def render_headered(rng, name, email_line, phone_line, addr, edu, exp, skills_str,
                    colon_style, underline):
    def header(h):
        if colon_style:
            return h.title() + ":"
        if underline:
            return h.upper() + "\n" + "-" * len(h)
        return h.upper()

    parts = [name]
    parts.append(email_line)
    parts.append(phone_line)
    if addr:
        parts.append(addr)
    parts.append("")
    if rng.random() < 0.5:
        parts.append(header("summary"))
        parts.append(
            f"Hardworking candidate from {pick(rng, CITIES)} seeking a suitable position."
        )
        parts.append("")
    section_blocks = []
    if edu:
        section_blocks.append((header("education"), "\n".join(e[0] for e in edu)))
    if exp:
        section_blocks.append((header("work experience"), "\n\n".join(x[0] for x in exp)))
    section_blocks.append((header("skills"), skills_str))
    if rng.random() < 0.5:
        section_blocks = section_blocks[::-1]
    for h, body in section_blocks:
        parts.append(h)
        parts.append(body)
        parts.append("")
    return "\n".join(parts).strip() + "\n"


def render_headerless(name, email, phone_raw, city, edu, exp, skills_str):
    parts = [name, email, phone_raw, city, ""]
    for line, gold in edu:
        inst, deg, year = gold["institution"], gold["degree"], gold["year"]
        gpa = gold["gpa"]
        sentence = f"Completed {deg} from {inst} in {year}"
        if gpa is not None and gpa <= 10:
            sentence += f" with CGPA: {gpa}"
        parts.append(sentence + ".")
        parts.append("")
    for block, gold in exp:
        parts.append(
            f"Worked as {gold['title']} in a private company and was responsible "
            f"for daily operations and team coordination."
        )
        parts.append("")
    parts.append(f"Proficient in {skills_str} and related tools, technologies.")
    return "\n".join(parts).strip() + "\n"


def main(out_dir):
    rng = np.random.default_rng(20250610)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(50):
        name = f"{pick(rng, FIRST)} {pick(rng, LAST)}"
        email = (
            name.lower().replace(" ", ".")
            + str(int(rng.integers(1, 99)))
            + "@"
            + pick(rng, DOMAINS)
        )
        phone_raw, phone_norm = make_phone(rng)
        has_phone = rng.random() > 0.08
        has_email = rng.random() > 0.05
        city = pick(rng, CITIES)
        addr = f"Address: {int(rng.integers(1, 200))} {pick(rng, ['Model Town', 'Civil Lines', 'Urban Estate'])}, {city} 14{int(rng.integers(1000, 9999)):04d}"

        headerless = i % 10 == 9  # every tenth resume exercises the fallback
        n_edu = int(rng.integers(1, 3))
        n_exp = 0 if headerless else int(rng.integers(0, 3))
        edu = make_education(rng, n_edu)
        exp = make_experience(rng, n_exp)
        skills_str, canon = make_skills(
            rng, int(rng.integers(4, 9)), with_unknown=rng.random() < 0.3
        )

        email_line = pick(rng, [f"Email: {email}", email]) if has_email else ""
        phone_line = pick(rng, [f"Phone: {phone_raw}", f"Mobile: {phone_raw}", phone_raw]) if has_phone else ""

        if headerless:
            text = render_headerless(
                name, email if has_email else "", phone_raw if has_phone else "",
                city, edu, exp, skills_str
            )
        else:
            text = render_headered(
                rng, name, email_line, phone_line,
                addr if rng.random() < 0.6 else "",
                edu, exp, skills_str,
                colon_style=rng.random() < 0.3,
                underline=rng.random() < 0.3,
            )

        gold = {
            "contact": {
                "name": name,
                "email": email if has_email else None,
                "phone": phone_norm if has_phone else None,
            },
            "education": [g for _, g in edu],
            "experience": [] if headerless else [g for _, g in exp],
            "skills": sorted(canon),
        }
        (out / f"resume_{i:02d}.txt").write_text(text, encoding="utf-8")
        (out / f"gold_{i:02d}.json").write_text(
            json.dumps(gold, indent=1), encoding="utf-8"
        )
    print(f"wrote 50 fixture pairs to {out}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/resumes")
