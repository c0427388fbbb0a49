"""Regenerate the bundled 24-event sample dataset.

Writes data/sample/events.csv plus one archive fixture per event under
data/sample/archive/. Everything is seeded, so reruns reproduce the
committed files byte for byte.

The three 2012-2014 Super Bowl rows pin their post/comment/score totals to
known reference values; the rest are synthetic fill shaped so that the
per-sport IQR screen keeps all 24 rows (asserted at the end). Fixtures
include out-of-window decoys, a boundary-exact post, tied timestamps, a
duplicated record, and a few moderated bodies so the ingest path is
exercised end to end.

Usage: python3 scripts/make_sample_data.py
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from buzzcast.archive import FixtureArchiveClient, fetch_window, write_posts_fixture
from buzzcast.events import (
    FetchWindow,
    RawPost,
    event_slug,
    load_viewership_csv,
)
from buzzcast.features import aggregate_event, write_engagement_csv
from buzzcast.preprocess import iqr_screen_by_sport, prepare_run
from buzzcast.sentiment import SentimentAnalyzers

SEED = 42
WINDOW_SECONDS = 72 * 3600

# name, sport, year, teams, ISO start, subreddit, viewers(M),
# posts, comments, scores, positivity
EVENTS = [
    ("World Series 2024 Game 1", "World_Series", 2024, "LAD;NYY",
     "2024-10-25T17:11:00-07:00", "baseball", 14.16, 58, 1820, 1460, 0.54),
    ("World Series 2024 Game 2", "World_Series", 2024, "LAD;NYY",
     "2024-10-26T17:15:00-07:00", "baseball", 13.71, 55, 1730, 1370, 0.48),
    ("World Series 2024 Game 3", "World_Series", 2024, "LAD;NYY",
     "2024-10-28T17:17:00-07:00", "baseball", 13.21, 52, 1650, 1290, 0.40),
    ("World Series 2024 Game 4", "World_Series", 2024, "LAD;NYY",
     "2024-10-29T17:08:00-07:00", "baseball", 16.28, 66, 2050, 1680, 0.68),
    ("World Series 2024 Game 5", "World_Series", 2024, "LAD;NYY",
     "2024-10-30T17:08:00-07:00", "baseball", 18.15, 74, 2280, 1890, 0.70),
    ("Super Bowl XLVI", "Super_Bowl", 2012, "NYG;NEP",
     "2012-02-05T18:30:00-05:00", "nfl", 111.35, 98, 2067, 1277, 0.54),
    ("Super Bowl XLVII", "Super_Bowl", 2013, "BAL;SF",
     "2013-02-03T18:30:00-05:00", "nfl", 108.69, 107, 2099, 4923, 0.40),
    ("Super Bowl XLVIII", "Super_Bowl", 2014, "SEA;DEN",
     "2014-02-02T18:30:00-05:00", "nfl", 112.19, 160, 2237, 3077, 0.68),
    ("Super Bowl XLIX", "Super_Bowl", 2015, "NEP;SEA",
     "2015-02-01T18:30:00-05:00", "nfl", 114.44, 129, 2150, 2600, 0.75),
    ("Super Bowl 50", "Super_Bowl", 2016, "DEN;CAR",
     "2016-02-07T18:30:00-05:00", "nfl", 111.86, 118, 2190, 2100, 0.61),
    ("Super Bowl LI", "Super_Bowl", 2017, "NEP;ATL",
     "2017-02-05T18:30:00-05:00", "nfl", 111.32, 142, 2320, 3900, 0.47),
    ("NBA Finals 2023 Game 1", "NBA_Finals", 2023, "DEN;MIA",
     "2023-06-01T20:30:00-04:00", "nba", 11.91, 47, 1440, 1150, 0.56),
    ("NBA Finals 2023 Game 2", "NBA_Finals", 2023, "DEN;MIA",
     "2023-06-04T20:00:00-04:00", "nba", 11.58, 44, 1380, 1060, 0.48),
    ("NBA Finals 2023 Game 5", "NBA_Finals", 2023, "DEN;MIA",
     "2023-06-12T20:30:00-04:00", "nba", 13.08, 51, 1540, 1260, 0.72),
    ("NBA Finals 2024 Game 1", "NBA_Finals", 2024, "BOS;DAL",
     "2024-06-06T20:30:00-04:00", "nba", 11.54, 43, 1350, 1020, 0.40),
    ("NBA Finals 2024 Game 5", "NBA_Finals", 2024, "BOS;DAL",
     "2024-06-17T20:30:00-04:00", "nba", 12.65, 49, 1490, 1210, 0.64),
    ("Stanley Cup Final 2023 Game 1", "Stanley_Cup", 2023, "VGK;FLA",
     "2023-06-03T20:00:00-04:00", "hockey", 4.59, 26, 760, 520, 0.50),
    ("Stanley Cup Final 2023 Game 5", "Stanley_Cup", 2023, "VGK;FLA",
     "2023-06-13T20:00:00-04:00", "hockey", 5.22, 29, 840, 580, 0.55),
    ("Stanley Cup Final 2024 Game 1", "Stanley_Cup", 2024, "FLA;EDM",
     "2024-06-08T20:00:00-04:00", "hockey", 4.89, 27, 790, 540, 0.52),
    ("Stanley Cup Final 2024 Game 7", "Stanley_Cup", 2024, "FLA;EDM",
     "2024-06-24T20:00:00-04:00", "hockey", 7.66, 33, 960, 700, 0.62),
    ("MLS Cup 2021", "MLS_Cup", 2021, "POR;NYC",
     "2021-12-11T13:00:00-05:00", "MLS", 1.14, 9, 180, 95, 0.52),
    ("MLS Cup 2022", "MLS_Cup", 2022, "LAFC;PHI",
     "2022-11-05T13:00:00-07:00", "MLS", 2.16, 12, 230, 140, 0.56),
    ("MLS Cup 2023", "MLS_Cup", 2023, "CLB;LAFC",
     "2023-12-09T16:00:00-05:00", "MLS", 2.30, 13, 250, 155, 0.58),
    ("MLS Cup 2024", "MLS_Cup", 2024, "LAG;NYRB",
     "2024-12-07T16:00:00-05:00", "MLS", 2.01, 11, 215, 125, 0.54),
]

POS_TITLES = [
    "What an amazing comeback by {A}",
    "{A} looked dominant tonight, what a win",
    "That clutch play was incredible",
    "Absolutely hyped for {A} vs {B}",
    "LFG {A} this is our year",
    "Best matchup of the season, love this game",
    "Epic performance, {A} fans are thrilled",
    "{B} played great but {A} was unstoppable",
    "Legendary stuff from the {A} bench",
    "So pumped for this one",
    "Brilliant defense wins championships",
    "What a thriller, instant classic",
]

NEG_TITLES = [
    "Brutal stretch for {B} fans",
    "That call was a disgrace",
    "Terrible officiating is ruining this series",
    "Painful way to lose, just awful",
    "{B} looked sloppy and slow out there",
    "Worst coaching decision of the year",
    "This matchup is a boring mess",
    "Injury news is a nightmare for {A}",
    "Embarrassing effort, no excuse",
    "Frustrated with the {B} front office again",
]

NEU_TITLES = [
    "Game thread: {A} vs {B}",
    "Pregame discussion: {A} at {B}",
    "Injury report ahead of the game",
    "Where are you watching {A} vs {B}?",
    "Ticket prices for the big game",
    "Broadcast schedule and start time",
    "Starting lineups announced",
    "Weather forecast for game day",
    "Who do you have winning this one?",
    "Stats preview: {A} against {B}",
]

POS_BODIES = [
    "This team is on fire and the energy is unreal.",
    "Honestly the best game I have watched in years.",
    "Huge momentum going in, fans should be excited.",
    "Such a fun series so far, every game delivers.",
    "Great coaching and gutsy play calls all night.",
    "The atmosphere is going to be electric.",
    "Win or lose, proud of this squad.",
    "Smart trades built a genuinely elite roster.",
]

NEG_BODIES = [
    "The defense looked lost and the effort was weak.",
    "Hard to watch, mistakes everywhere and zero urgency.",
    "Another disappointing outing from the stars.",
    "Refs ruined the flow of the game again.",
    "Injuries are piling up at the worst time.",
    "This roster is mediocre and it shows.",
    "Sloppy turnovers and a hopeless fourth quarter.",
    "Ugly stuff, the front office should be ashamed.",
]

NEU_BODIES = [
    "Discussion thread for tonight, keep it civil.",
    "Kickoff is at the usual time, check your local listings.",
    "Link roundup of press conferences and interviews.",
    "Season stats for both teams attached below.",
    "Mods will post the live thread an hour before start.",
    "Reminder about the subreddit match-day rules.",
    "Both coaches spoke to media this morning.",
    "Travel thread for anyone attending in person.",
]

SPECIAL_TITLES = [
    "Three days out: {A} vs {B} open thread",  # sits exactly at window start
    "This matchup is very exciting, cannot wait",  # booster word in play
    "Not good signs for {B} after practice",  # negation in play
    "HUGE win incoming for {A}!!",  # caps emphasis plus exclamations
]


def make_event_posts(rng, slug, teams, start_sec, subreddit, n_posts, n_comments,
                     n_scores, positivity):
    a, b = teams
    after = start_sec - WINDOW_SECONDS
    offsets = rng.choice(WINDOW_SECONDS - 1, size=n_posts - 1, replace=False)
    times = [after] + sorted(int(after + 1 + off) for off in offsets)
    if n_posts >= 6:
        times[5] = times[4]  # deliberate tie: distinct ids, same second
    comments = rng.multinomial(n_comments, rng.dirichlet(np.full(n_posts, 2.5)))
    scores = rng.multinomial(n_scores, rng.dirichlet(np.full(n_posts, 2.0)))

    def fill(t):
        return t.replace("{A}", a).replace("{B}", b)

    posts = []
    for i in range(n_posts):
        if i < len(SPECIAL_TITLES):
            title = fill(SPECIAL_TITLES[i])
            body = ""
        else:
            r = rng.random()
            if r < positivity:
                title = fill(str(rng.choice(POS_TITLES)))
                if rng.random() < 0.25:
                    title += "!" * int(rng.integers(1, 4))
                pool = POS_BODIES
            elif r < positivity + (1 - positivity) * 0.45:
                title = fill(str(rng.choice(NEG_TITLES)))
                pool = NEG_BODIES
            else:
                title = fill(str(rng.choice(NEU_TITLES)))
                pool = NEU_BODIES
            roll = rng.random()
            if roll < 0.22:
                body = ""
            elif roll < 0.27:
                body = "[removed]"
            else:
                body = fill(str(rng.choice(pool)))
        posts.append(
            RawPost(
                id=f"{slug[:10]}_{i:03d}",
                title=title,
                body=body,
                score=int(scores[i]),
                num_comments=int(comments[i]),
                created_utc=times[i],
                subreddit=subreddit,
            )
        )
    decoys = [
        RawPost(id=f"{slug[:10]}_d0", title=fill("Game thread: {A} vs {B}"),
                body="", score=40, num_comments=120,
                created_utc=start_sec, subreddit=subreddit),
        RawPost(id=f"{slug[:10]}_d1", title="Last week's recap thread",
                body="", score=15, num_comments=30,
                created_utc=after - 40, subreddit=subreddit),
        RawPost(id=f"{slug[:10]}_d2", title=fill("Postgame thread: {A} vs {B}"),
                body="", score=90, num_comments=400,
                created_utc=start_sec + 7200, subreddit=subreddit),
    ]
    return posts, decoys


def main():
    rng = np.random.default_rng(SEED)
    sample_dir = REPO / "data" / "sample"
    archive_dir = sample_dir / "archive"
    archive_dir.mkdir(parents=True, exist_ok=True)

    lines = ["name,sport,year,teams,start_time,subreddit,avg_viewers_millions"]
    for (name, sport, year, teams, iso, sub, viewers, *_rest) in EVENTS:
        lines.append(f"{name},{sport},{year},{teams},{iso},{sub},{viewers}")
    (sample_dir / "events.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    events = load_viewership_csv(sample_dir / "events.csv")
    expected = {e[0]: e for e in EVENTS}
    for event in events:
        name = event.spec.name
        (_n, _s, _y, teams, _iso, sub, _v, n_posts, n_comments, n_scores,
         positivity) = expected[name]
        slug = event_slug(name)
        posts, decoys = make_event_posts(
            rng, slug, teams.split(";"), event.spec.start_time, sub,
            n_posts, n_comments, n_scores, positivity,
        )
        records = posts + decoys
        if name == "Super Bowl XLVIII":
            records.append(posts[57])  # duplicated record, survives dedupe once
        order = rng.permutation(len(records))
        shuffled = [records[i] for i in order]
        write_posts_fixture(archive_dir / f"{slug}.json", shuffled, page_size=100)

    # Verify the committed data behaves: window math, totals, and the screen.
    analyzers = SentimentAnalyzers.default()
    rows = []
    for event in events:
        name = event.spec.name
        slug = event_slug(name)
        client = FixtureArchiveClient.from_file(archive_dir / f"{slug}.json")
        fetched = fetch_window(event.spec, client)
        exp = expected[name]
        assert len(fetched) == exp[7], (name, len(fetched), exp[7])
        assert sum(p.num_comments for p in fetched) == exp[8], name
        assert sum(p.score for p in fetched) == exp[9], name
        window = FetchWindow.preceding(event.spec)
        assert all(window.contains(p.created_utc) for p in fetched), name
        assert len({p.id for p in fetched}) == len(fetched), name
        rows.append(aggregate_event(event, fetched, analyzers))
    kept, flags = iqr_screen_by_sport(rows)
    assert not flags, [f"{f.name}/{f.feature}" for f in flags]
    write_engagement_csv(sample_dir / "engagement.csv", rows)

    prepared = prepare_run(rows, seed=SEED)
    print(f"events: {len(rows)}, train {len(prepared.split.train)} / "
          f"test {len(prepared.split.test)}")
    for r in rows:
        print(f"  {r.name}: posts {r.total_posts} comments {r.total_comments} "
              f"scores {r.total_scores} pol {r.avg_polarity:+.3f} "
              f"comp {r.avg_compound:+.3f} viewers {r.avg_viewers_millions}")
    print("test split:", ", ".join(prepared.names_test))


if __name__ == "__main__":
    main()
