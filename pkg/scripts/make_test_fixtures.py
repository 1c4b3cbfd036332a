#!/usr/bin/env python3
"""Regenerate the committed fixtures under tests/data/.

Deterministic: a fixed RNG seed drives the coverage fixture, everything else
is written literally. The coverage golden file is computed here with plain
Fraction arithmetic (mean of per-entity archived fractions, half-up whole
percents) so the test suite can compare the analytics pipeline against an
independently derived table.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import floor
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "tests" / "data"

SEED = 1312


def write_lines(path: Path, lines: list[str]):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")


# (id, lang, title, redirects, category, views-by-day rows)
ENTITIES_EN = [
    ("Barack_Obama", "Barack Obama", "Obama|Barack Hussein Obama", "politician"),
    ("Angela_Merkel", "Angela Merkel", "Merkel, Angela", "politician"),
    ("Donald_Trump", "Donald Trump", "Trump", "business people"),
    ("Lady_Gaga", "Lady Gaga", "Stefani Germanotta", "actor"),
    ("Climate_change", "climate change", "global warming", "politics"),
    ("Hillary_Clinton", "Hillary Clinton", "Clinton, Hillary", "politician"),
    ("Gerhard_Schröder", "Gerhard Schröder", "Schroeder, Gerhard|Gerhard Schroeder", "politician"),
    ("Pablo_Picasso", "Pablo Picasso", "Picasso", "painter"),
    ("Germany", "Germany", "Deutschland|Federal Republic of Germany", "politics"),
    ("Vietnam", "Vietnam", "", "politics"),
    ("Ku_Klux_Klan", "Ku Klux Klan", "KKK", "politics"),
    ("Beyoncé", "Beyoncé", "", "actor"),
    ("Ernest_Hemingway", "Ernest Hemingway", "Hemingway", "journalist"),
    ("Leonard_Nimoy", "Leonard Nimoy", "", "actor"),
    ("Elon_Musk", "Elon Musk", "", "business people"),
    ("Banksy", "Banksy", "", "painter"),
    ("Giuliana_Rancic", "Giuliana Rancic", "", "journalist"),
    ("Costa_Concordia_disaster", "Costa Concordia disaster", "Costa Concordia", "incidents"),
    ("Battle_of_Rathmines", "Battle of Rathmines", "", "incidents"),
    ("São_Paulo", "São Paulo", "", "location"),
]

ENTITIES_DE = [
    ("Klimawandel", "Klimawandel", "Globale Erwärmung", "politics"),
    ("Angela_Merkel", "Angela Merkel", "", "politician"),
    ("Gerhard_Schröder", "Gerhard Schröder", "", "politician"),
    ("Deutschland", "Deutschland", "BRD", "politics"),
]

VIEWS_EN = [
    ("Barack Obama", "2011-01-05", 3000),
    ("Obama", "2012-02-02", 1500),
    ("Barack Hussein Obama", "2013-03-03", 500),
    ("Angela Merkel", "2012-01-01", 3000),
    ("Merkel, Angela", "2013-05-10", 1000),
    ("Angela Merkel", "2015-06-01", 999),  # outside the window
    ("Angela Merkel", "2010-12-31", 777),  # outside the window
    ("Donald Trump", "2014-07-04", 3000),
    ("Trump", "2011-11-11", 500),
    ("Lady Gaga", "2011-03-21", 2000),
    ("Stefani Germanotta", "2012-08-08", 1000),
    ("climate change", "2013-06-30", 1500),
    ("global warming", "2011-04-22", 1000),
    ("Hillary Clinton", "2014-10-10", 2000),
    ("Clinton, Hillary", "2012-12-12", 400),
    ("Gerhard Schröder", "2011-09-18", 1200),
    ("Schroeder, Gerhard", "2012-05-22", 500),
    ("Gerhard Schroeder", "2013-02-14", 300),
    ("Pablo Picasso", "2011-10-25", 1000),
    ("Picasso", "2014-04-08", 500),
    ("Germany", "2012-10-03", 900),
    ("Deutschland", "2011-10-03", 300),
    ("Federal Republic of Germany", "2013-10-03", 200),
    ("Vietnam", "2011-04-30", 1200),
    ("Ku Klux Klan", "2012-03-15", 800),
    ("KKK", "2013-07-19", 200),
    ("Beyoncé", "2013-12-13", 1100),
    ("Ernest Hemingway", "2011-07-02", 900),
    ("Leonard Nimoy", "2014-02-27", 800),
    ("Elon Musk", "2014-06-28", 700),
    ("Banksy", "2013-10-13", 600),
    ("Giuliana Rancic", "2012-08-17", 500),
    ("Costa Concordia disaster", "2012-01-13", 350),
    ("Costa Concordia", "2012-01-14", 50),
    ("Battle of Rathmines", "2011-08-02", 300),
    ("São Paulo", "2014-01-25", 250),
    ("Some Forgotten Page", "2012-03-03", 50),  # orphan: matches no entity
]

LINKS_EN = {
    "a1": ["Angela_Merkel", "Gerhard_Schröder", "Germany"],
    "a2": ["Angela_Merkel", "Gerhard_Schröder", "Germany"],
    "a3": ["Angela_Merkel", "Gerhard_Schröder", "Barack_Obama"],
    "a4": ["Angela_Merkel", "Gerhard_Schröder", "Barack_Obama"],
    "a5": ["Angela_Merkel", "Barack_Obama", "Hillary_Clinton"],
    "a6": ["Angela_Merkel", "Barack_Obama"],
    "a7": ["Barack_Obama", "Donald_Trump", "Hillary_Clinton"],
    "a8": ["Barack_Obama", "Donald_Trump"],
    "a9": ["Donald_Trump", "Hillary_Clinton"],
    "a10": ["Hillary_Clinton"],
    "a11": ["Germany"],
    "a12": ["Germany", "Climate_change"],
    "a13": ["Germany", "Climate_change"],
    "a14": ["Climate_change"],
    "a15": ["Vietnam"],
    "a16": ["Ku_Klux_Klan"],
    "a17": ["Ku_Klux_Klan"],
    "a18": ["Pablo_Picasso"],
}

LINKS_DE = {
    "b1": ["Klimawandel", "Deutschland"],
    "b2": ["Klimawandel", "Deutschland", "Angela_Merkel"],
    "b3": ["Deutschland", "Angela_Merkel"],
}

INTERLANG = [
    ("en", "climate change", "de", "Klimawandel"),
    ("en", "Angela Merkel", "de", "Angela Merkel"),
    ("en", "Germany", "de", "Deutschland"),
    ("en", "Gerhard Schröder", "de", "Gerhard Schröder"),
]

MERKEL_RESULTS = [
    ("https://de.wikipedia.org/wiki/Angela_Merkel", "Angela Merkel – Wikipedia",
     "Angela Dorothea Merkel ist eine deutsche Politikerin."),
    ("https://www.bundeskanzlerin.de/", "Bundeskanzlerin Angela Merkel",
     "Offizielle Seite der Bundeskanzlerin."),
    ("https://www.bundesregierung.de/merkel", "Die Bundeskanzlerin",
     "Informationen der Bundesregierung."),
    ("https://www.spiegel.de/thema/angela_merkel/", "Angela Merkel - DER SPIEGEL",
     "Alle Artikel und Hintergruende."),
    ("https://www.zeit.de/thema/angela-merkel", "Angela Merkel | ZEIT ONLINE",
     "Nachrichten und Analysen."),
    ("https://www.faz.net/aktuell/politik/merkel", "Merkel aktuell - FAZ",
     "Aktuelle Nachrichten."),
    ("https://www.tagesschau.de/merkel-news-123", "Merkel: Regierungserklaerung",
     "Bericht vom Tage."),
    ("https://www.welt.de/politik/merkel", "Angela Merkel - WELT",
     "Politik-Nachrichten."),
    ("https://www.sueddeutsche.de/thema/Angela_Merkel", "Angela Merkel - SZ",
     "Aktuelle Meldungen."),
    ("https://www.handelsblatt.com/merkel", "Merkel im Handelsblatt",
     "Wirtschaft und Politik."),
]

SCHROEDER_RESULTS = [
    ("https://en.wikipedia.org/wiki/Gerhard_Schroeder", "Gerhard Schroeder - Wikipedia",
     "Gerhard Schroeder is a German politician."),
    ("https://www.britannica.com/biography/Gerhard-Schroeder", "Gerhard Schroeder | Britannica",
     "German chancellor from 1998 to 2005."),
    ("https://www.dw.com/en/gerhard-schroeder/t-17034512", "Gerhard Schroeder | DW",
     "News and background."),
    ("https://www.theguardian.com/world/gerhard-schroder", "Gerhard Schroder | The Guardian",
     "Latest news and comment."),
    ("https://www.nytimes.com/topic/person/gerhard-schroder", "Gerhard Schroder - NYT",
     "Coverage of the former chancellor."),
    ("https://www.reuters.com/schroeder-profile", "Profile: Gerhard Schroeder",
     "Reuters profile."),
    ("https://www.spiegel.de/thema/gerhard_schroeder/", "Gerhard Schroeder - DER SPIEGEL",
     "Alle Artikel."),
    ("https://www.bbc.com/news/schroeder", "Schroeder: profile", "BBC profile."),
    ("https://www.ft.com/gerhard-schroeder", "Gerhard Schroeder - FT", "FT coverage."),
    ("https://www.politico.eu/person/gerhard-schroder/", "Gerhard Schroder - POLITICO",
     "Policy news."),
]

CLIMATE_EN_RESULTS = [
    ("https://en.wikipedia.org/wiki/Climate_change", "Climate change - Wikipedia",
     "Climate change refers to long-term shifts."),
    ("https://climate.nasa.gov/", "Climate Change: Vital Signs", "NASA climate portal."),
    ("https://www.ipcc.ch/", "IPCC", "Intergovernmental Panel on Climate Change."),
    ("https://www.un.org/en/climatechange", "United Nations | Climate Action",
     "UN climate action."),
    ("https://www.epa.gov/climate-change", "Climate Change | US EPA", "EPA resources."),
    ("https://www.nationalgeographic.com/environment/climate-change",
     "Climate change - National Geographic", "Reference and news."),
    ("https://www.bbc.com/news/science-environment-56837908", "What is climate change?",
     "A really simple guide."),
    ("https://www.theguardian.com/environment/climate-crisis", "Climate crisis | The Guardian",
     "Latest news."),
    ("https://www.worldbank.org/en/topic/climatechange", "Climate Change - World Bank",
     "Development and climate."),
    ("https://www.noaa.gov/climate", "Climate | NOAA", "Climate data and services."),
]

KLIMAWANDEL_RESULTS = [
    ("https://de.wikipedia.org/wiki/Klimawandel", "Klimawandel – Wikipedia",
     "Als Klimawandel wird die Veraenderung des Klimas bezeichnet."),
    ("https://www.umweltbundesamt.de/themen/klima-energie", "Klima | Umweltbundesamt",
     "Daten und Fakten."),
    ("https://www.bmuv.de/themen/klimaschutz", "Klimaschutz | BMUV", "Politik und Programme."),
    ("https://www.dwd.de/DE/klimaumwelt/klimawandel", "Klimawandel - DWD",
     "Deutscher Wetterdienst."),
    ("https://www.zdf.de/nachrichten/thema/klimawandel-102.html", "Klimawandel - ZDF",
     "Nachrichten."),
    ("https://www.tagesschau.de/thema/klimawandel/", "Klimawandel - tagesschau",
     "Aktuelle Berichte."),
    ("https://www.spiegel.de/thema/klimawandel/", "Klimawandel - DER SPIEGEL", "Alle Artikel."),
    ("https://www.zeit.de/thema/klimawandel", "Klimawandel | ZEIT ONLINE", "Hintergruende."),
    ("https://www.geo.de/natur/klimawandel", "Klimawandel - GEO", "Wissen."),
    ("https://www.quarks.de/umwelt/klimawandel/", "Klimawandel - Quarks", "Erklaert."),
]

VIETNAM_RESULTS = [
    ("https://en.wikipedia.org/wiki/Vietnam", "Vietnam - Wikipedia",
     "Vietnam is a country in Southeast Asia."),
    ("https://vietnam.travel/", "Vietnam Tourism", "Official tourism website."),
    ("https://www.britannica.com/place/Vietnam", "Vietnam | Britannica", "History and facts."),
]


def obama_results(period: str) -> list[tuple[str, str, str]]:
    """100 ranked URLs; 30 shared in the top 50, 17 more shared at 51..67."""
    rows = []
    for i in range(1, 31):
        rows.append((f"https://obama.example.org/shared-top/{i:02d}",
                     f"Barack Obama profile {i}", "Long-standing biography page."))
    for i in range(31, 51):
        rows.append((f"https://{period}.example.org/obama/news-{i:02d}",
                     f"Obama news {i} ({period})", "Recent news article."))
    for i in range(1, 18):
        rows.append((f"https://obama.example.org/shared-tail/{i:02d}",
                     f"Obama reference {i}", "Reference page."))
    for i in range(68, 101):
        rows.append((f"https://{period}.example.org/obama/extra-{i:03d}",
                     f"Obama item {i} ({period})", "Changing tail result."))
    return rows


def write_result_file(path: Path, rows: list[tuple[str, str, str]]):
    write_lines(path, [f"{i}\t{url}\t{title}\t{snippet}"
                       for i, (url, title, snippet) in enumerate(rows, start=1)])


def make_annotations() -> list[str]:
    lines = []
    # Pablo Picasso: 122 long-majority + 3 short-majority of 125 decided -> 97.60 / 2.40
    vote_cycle = ["long,long,long,long", "long,long,long,short", "long,long,long,long,unknown"]
    for i in range(1, 123):
        lines.append(f"Pablo Picasso\thttps://picasso.example.org/page-{i:03d}\t"
                     f"{vote_cycle[i % 3]}")
    for i in range(1, 4):
        lines.append(f"Pablo Picasso\thttps://picasso.example.org/news-{i}\t"
                     "short,short,short,long")
    # two ties -> UNKNOWN, excluded from the percentages
    lines.append("Pablo Picasso\thttps://picasso.example.org/tie-1\tlong,long,short,short")
    lines.append("Pablo Picasso\thttps://picasso.example.org/tie-2\tlong,short,unknown,unknown")
    # Vietnam: all decided URLs long -> 100.00 / 0.00
    for i in range(1, 11):
        labels = "long,long,long,unknown" if i % 2 else "long,long,long,long"
        lines.append(f"Vietnam\thttps://vietnam.example.org/page-{i:02d}\t{labels}")
    # Ku Klux Klan: 1 long + 7 short of 8 decided -> 12.50 / 87.50
    lines.append("Ku Klux Klan\thttps://kkk.example.org/history\tlong,long,long,short")
    for i in range(1, 8):
        lines.append(f"Ku Klux Klan\thttps://kkk.example.org/news-{i}\tshort,short,short,unknown")
    return lines


def make_coverage_fixture(out_dir: Path):
    """2 buckets x 20 entities x 50 results with front-loaded archived flags.

    Front-loading (first m archived, rest not) makes every per-entity
    fraction non-increasing in the cutoff, hence also the bucket means.
    """
    rng = random.Random(SEED)
    retrieved = "2015-08-20T12:00:00+00:00"
    buckets = {
        "a": [rng.randint(7, 50) for _ in range(20)],
        "b": [rng.randint(2, 35) for _ in range(20)],
    }
    manifest = []
    ranked = []
    flags = []
    archived_counts: dict[str, list[int]] = {"a": [], "b": []}
    base_views = {"a": 4000, "b": 2000}
    for bucket, ms in buckets.items():
        for j, m in enumerate(ms, start=1):
            title = f"coverage entity {bucket}{j:02d}"
            slug = title.replace(" ", "_")
            ranked.append((title, base_views[bucket] - 10 * j))
            rows = []
            for i in range(1, 51):
                url = f"http://cov.example.org/{slug}/{i:02d}"
                rows.append((url, f"{title} result {i}", "coverage fixture row"))
                flags.append(f"{url}\t{1 if i <= m else 0}")
            name = f"{slug}__en__2015-08-20T120000.tsv"
            write_result_file(out_dir / name, rows)
            manifest.append(f"{title}\ten\t{retrieved}\t{name}")
            archived_counts[bucket].append(m)
    write_lines(out_dir / "manifest.tsv", manifest)
    write_lines(out_dir / "archived.tsv", flags)
    ranked.sort(key=lambda item: -item[1])
    write_lines(out_dir / "ranked.tsv", [f"{t}\t{v}" for t, v in ranked])

    # independent golden computation: mean of per-entity fractions, half-up
    cutoffs = (10, 20, 30, 40, 50)
    golden = ["Entity rank\t" + "\t".join(f"Top {k}" for k in cutoffs)]
    labels = {"a": "1 - 20", "b": "21 - 40"}
    for bucket in ("a", "b"):
        cells = []
        for k in cutoffs:
            mean = sum(Fraction(min(m, k), k) for m in archived_counts[bucket])
            pct = 100 * mean / len(archived_counts[bucket])
            cells.append(f"{floor(pct + Fraction(1, 2))}%")
        golden.append(labels[bucket] + "\t" + "\t".join(cells))
    write_lines(out_dir / "coverage.golden.tsv", golden)


def main():
    raw = DATA / "raw"
    entity_lines = [f"{eid}\ten\t{title}\t{redirects}\t{category}"
                    for eid, title, redirects, category in ENTITIES_EN]
    entity_lines += [f"{eid}\tde\t{title}\t{redirects}\t{category}"
                     for eid, title, redirects, category in ENTITIES_DE]
    write_lines(raw / "entities.tsv", entity_lines)
    write_lines(raw / "views.en.tsv", [f"{t}\t{d}\t{c}" for t, d, c in VIEWS_EN])
    for name, links, w in (("links.en.tsv", LINKS_EN, 1000), ("links.de.tsv", LINKS_DE, 500)):
        lines = [f"W\t{w}"]
        for source, targets in links.items():
            lines.extend(f"{source}\t{target}" for target in targets)
        write_lines(raw / name, lines)
    write_lines(raw / "interlang.tsv", ["\t".join(row) for row in INTERLANG])

    results = DATA / "results"
    write_result_file(results / "angela_merkel__de__2015-08-20.tsv", MERKEL_RESULTS)
    write_result_file(results / "gerhard_schröder__en__2016-01-10.tsv", SCHROEDER_RESULTS)
    write_result_file(results / "climate_change__en__2015-08-20.tsv", CLIMATE_EN_RESULTS)
    write_result_file(results / "klimawandel__de__2015-08-20.tsv", KLIMAWANDEL_RESULTS)
    write_result_file(results / "vietnam__en__2015-08-20.tsv", VIETNAM_RESULTS)
    write_result_file(results / "barack_obama__en__2015-06-15.tsv", obama_results("june"))
    write_result_file(results / "barack_obama__en__2015-08-17.tsv", obama_results("august"))

    write_lines(DATA / "annotations.tsv", make_annotations())
    make_coverage_fixture(DATA / "coverage_fixture")
    print(f"fixtures written under {DATA}")


if __name__ == "__main__":
    main()
