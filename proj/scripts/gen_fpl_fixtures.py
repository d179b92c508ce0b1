#!/usr/bin/env python3
"""Writes the bundled replay fixture set under data/fixtures/fpl.

The payloads mirror the shape of the public FPL endpoints (bootstrap-static,
fixtures, element-summary/{id}) for a late 2024/25 snapshot (gameweek 33
finished). Headline values (team table, top scorers, James Milner's past
seasons) follow the published snapshot; the remaining per-match detail is
filled in deterministically from a fixed seed.
"""
import json
import os
import random
import sys

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data", "fixtures", "fpl")
FINISHED_GW = 33
TOTAL_GW = 38
CAPTURED_AT = "2025-04-22T03:00:00Z"

# name, position, points, strength, win, draw, loss, short_name
TEAMS = [
    ("Liverpool", 1, 76, 5, 23, 7, 3, "LIV"),
    ("Arsenal", 2, 63, 4, 17, 12, 4, "ARS"),
    ("Nott'm Forest", 3, 57, 4, 17, 6, 10, "NFO"),
    ("Newcastle", 4, 56, 4, 17, 5, 11, "NEW"),
    ("Man City", 5, 55, 4, 16, 7, 10, "MCI"),
    ("Chelsea", 6, 54, 4, 15, 9, 9, "CHE"),
    ("Aston Villa", 7, 54, 3, 15, 9, 9, "AVL"),
    ("Bournemouth", 8, 48, 4, 13, 9, 11, "BOU"),
    ("Fulham", 9, 48, 3, 13, 9, 11, "FUL"),
    ("Brighton", 10, 48, 3, 12, 12, 9, "BHA"),
    ("Brentford", 11, 43, 3, 12, 7, 14, "BRE"),
    ("Crystal Palace", 12, 43, 3, 11, 10, 12, "CRY"),
    ("Everton", 13, 38, 3, 8, 14, 11, "EVE"),
    ("Man Utd", 14, 38, 3, 10, 8, 15, "MUN"),
    ("Spurs", 15, 37, 3, 11, 4, 18, "TOT"),
    ("Wolves", 16, 35, 3, 9, 8, 16, "WOL"),
    ("West Ham", 17, 35, 3, 9, 8, 16, "WHU"),
    ("Ipswich", 18, 21, 3, 3, 12, 18, "IPS"),
    ("Leicester", 19, 18, 3, 4, 6, 23, "LEI"),
    ("Southampton", 20, 10, 2, 2, 4, 27, "SOU"),
]

# team -> [(web_name, first, second, element_type, goals or None)]
SQUADS = {
    "Liverpool": [("Alisson", "Alisson", "Becker", 1, None), ("Robertson", "Andrew", "Robertson", 2, None),
                  ("Virgil", "Virgil", "van Dijk", 2, None), ("M.Salah", "Mohamed", "Salah", 3, 27),
                  ("Gakpo", "Cody", "Gakpo", 3, None), ("Luis Díaz", "Luis", "Díaz", 3, None),
                  ("Jota", "Diogo", "Jota", 4, None)],
    "Arsenal": [("Raya", "David", "Raya", 1, None), ("Saliba", "William", "Saliba", 2, None),
                ("Gabriel", "Gabriel", "Magalhães", 2, None), ("Saka", "Bukayo", "Saka", 3, None),
                ("Ødegaard", "Martin", "Ødegaard", 3, None), ("Rice", "Declan", "Rice", 3, None),
                ("Havertz", "Kai", "Havertz", 4, None)],
    "Nott'm Forest": [("Sels", "Matz", "Sels", 1, None), ("Murillo", "Murillo", "Santiago", 2, None),
                      ("Elanga", "Anthony", "Elanga", 3, None), ("Gibbs-White", "Morgan", "Gibbs-White", 3, None),
                      ("Wood", "Chris", "Wood", 4, 18)],
    "Newcastle": [("Pope", "Nick", "Pope", 1, None), ("Hall", "Lewis", "Hall", 2, None),
                  ("Gordon", "Anthony", "Gordon", 3, None), ("Bruno G.", "Bruno", "Guimarães", 3, None),
                  ("Isak", "Alexander", "Isak", 4, 20)],
    "Man City": [("Ederson M.", "Ederson", "Moraes", 1, None), ("Gvardiol", "Joško", "Gvardiol", 2, None),
                 ("Walker", "Kyle", "Walker", 2, None), ("Foden", "Phil", "Foden", 3, None),
                 ("De Bruyne", "Kevin", "De Bruyne", 3, None), ("Haaland", "Erling", "Haaland", 4, 21),
                 ("Marmoush", "Omar", "Marmoush", 4, None)],
    "Chelsea": [("Sánchez", "Robert", "Sánchez", 1, None), ("Cucurella", "Marc", "Cucurella", 2, None),
                ("Palmer", "Cole", "Palmer", 3, 14), ("Madueke", "Noni", "Madueke", 3, None),
                ("N.Jackson", "Nicolas", "Jackson", 4, None)],
    "Aston Villa": [("Martinez", "Emiliano", "Martínez", 1, None), ("Digne", "Lucas", "Digne", 2, None),
                    ("Rogers", "Morgan", "Rogers", 3, None), ("McGinn", "John", "McGinn", 3, None),
                    ("Watkins", "Ollie", "Watkins", 4, 14)],
    "Bournemouth": [("Kepa", "Kepa", "Arrizabalaga", 1, None), ("Kerkez", "Milos", "Kerkez", 2, None),
                    ("Semenyo", "Antoine", "Semenyo", 3, None), ("Kluivert", "Justin", "Kluivert", 3, None),
                    ("Evanilson", "Evanilson", "Barbosa", 4, None)],
    "Fulham": [("Leno", "Bernd", "Leno", 1, None), ("Robinson", "Antonee", "Robinson", 2, None),
               ("Iwobi", "Alex", "Iwobi", 3, None), ("Smith Rowe", "Emile", "Smith Rowe", 3, None),
               ("Raúl", "Raúl", "Jiménez", 4, None)],
    "Brighton": [("Verbruggen", "Bart", "Verbruggen", 1, None), ("Dunk", "Lewis", "Dunk", 2, None),
                 ("Milner", "James", "Milner", 3, None), ("Mitoma", "Kaoru", "Mitoma", 3, None),
                 ("Welbeck", "Danny", "Welbeck", 4, None), ("João Pedro", "João Pedro", "Junqueira de Jesus", 4, None)],
    "Brentford": [("Flekken", "Mark", "Flekken", 1, None), ("Collins", "Nathan", "Collins", 2, None),
                  ("Mbeumo", "Bryan", "Mbeumo", 3, 16), ("Schade", "Kevin", "Schade", 3, None),
                  ("Wissa", "Yoane", "Wissa", 4, 14)],
    "Crystal Palace": [("Henderson", "Dean", "Henderson", 1, None), ("Mitchell", "Tyrick", "Mitchell", 2, None),
                       ("Eze", "Eberechi", "Eze", 3, None), ("Sarr", "Ismaïla", "Sarr", 3, None),
                       ("Mateta", "Jean-Philippe", "Mateta", 4, 13)],
    "Everton": [("Pickford", "Jordan", "Pickford", 1, None), ("Tarkowski", "James", "Tarkowski", 2, None),
                ("McNeil", "Dwight", "McNeil", 3, None), ("Ndiaye", "Iliman", "Ndiaye", 3, None),
                ("Beto", "Beto", "Betuncal", 4, None)],
    "Man Utd": [("Onana", "André", "Onana", 1, None), ("Dalot", "Diogo", "Dalot Teixeira", 2, None),
                ("B.Fernandes", "Bruno", "Borges Fernandes", 3, None), ("Amad", "Amad", "Diallo", 3, None),
                ("Højlund", "Rasmus", "Højlund", 4, None)],
    "Spurs": [("Vicario", "Guglielmo", "Vicario", 1, None), ("Porro", "Pedro", "Porro", 2, None),
              ("Maddison", "James", "Maddison", 3, None), ("Son", "Heung-Min", "Son", 3, None),
              ("Johnson", "Brennan", "Johnson", 3, None), ("Solanke", "Dominic", "Solanke", 4, None)],
    "Wolves": [("José Sá", "José", "Malheiro de Sá", 1, None), ("Aït-Nouri", "Rayan", "Aït-Nouri", 2, None),
               ("Bellegarde", "Jean-Ricner", "Bellegarde", 3, None), ("Cunha", "Matheus", "Santos Carneiro Da Cunha", 4, 14),
               ("Strand Larsen", "Jørgen", "Strand Larsen", 4, None)],
    "West Ham": [("Areola", "Alphonse", "Areola", 1, None), ("Wan-Bissaka", "Aaron", "Wan-Bissaka", 2, None),
                 ("Bowen", "Jarrod", "Bowen", 3, None), ("Kudus", "Mohammed", "Kudus", 3, None),
                 ("Füllkrug", "Niclas", "Füllkrug", 4, None)],
    "Ipswich": [("Walton", "Christian", "Walton", 1, None), ("Davis", "Leif", "Davis", 2, None),
                ("Hutchinson", "Omari", "Hutchinson", 3, None), ("Philogene", "Jaden", "Philogene", 3, None),
                ("Delap", "Liam", "Delap", 4, None)],
    "Leicester": [("Hermansen", "Mads", "Hermansen", 1, None), ("Justin", "James", "Justin", 2, None),
                  ("El Khannouss", "Bilal", "El Khannouss", 3, None), ("Fatawu", "Abdul", "Fatawu", 3, None),
                  ("Vardy", "Jamie", "Vardy", 4, None)],
    "Southampton": [("Ramsdale", "Aaron", "Ramsdale", 1, None), ("Harwood-Bellis", "Taylor", "Harwood-Bellis", 2, None),
                    ("Fernandes", "Mateus", "Fernandes", 3, None), ("Dibling", "Tyler", "Dibling", 3, None),
                    ("Archer", "Cameron", "Archer", 4, None)],
}

# Joined mid-season (first gameweek with an appearance) / left the league (last gameweek).
JOINED = {"Marmoush": 21}
LEFT = {"Walker": 21}

MILNER_HISTORY = [
    ("2006/07", 114, 2675, 3, 7, 0), ("2007/08", 84, 2227, 2, 2, 0), ("2008/09", 128, 3060, 3, 9, 0),
    ("2009/10", 184, 3172, 7, 12, 0), ("2010/11", 97, 2134, 1, 7, 11), ("2011/12", 86, 1586, 3, 5, 6),
    ("2012/13", 96, 1724, 4, 4, 11), ("2013/14", 67, 1373, 1, 6, 5), ("2014/15", 107, 1749, 5, 8, 7),
    ("2015/16", 123, 2409, 5, 11, 8), ("2016/17", 139, 3154, 7, 4, 12), ("2017/18", 77, 1759, 0, 3, 6),
    ("2018/19", 101, 1778, 5, 5, 9), ("2019/20", 49, 924, 2, 2, 4), ("2020/21", 44, 1056, 0, 2, 4),
    ("2021/22", 38, 844, 0, 1, 4), ("2022/23", 42, 889, 0, 1, 3), ("2023/24", 28, 770, 0, 2, 4),
]

POS_NAMES = {1: ("Goalkeeper", "GKP"), 2: ("Defender", "DEF"), 3: ("Midfielder", "MID"), 4: ("Forward", "FWD")}


def kickoff(gw, slot):
    day = 16 + (gw - 1) * 7
    # Spread across a simple 30-day month calendar starting 2024-08.
    month_index, d = divmod(day - 1, 30)
    year = 2024 + (7 + month_index) // 12
    month = (7 + month_index) % 12 + 1
    hour = 12 + 2 * (slot % 4)
    return f"{year:04d}-{month:02d}-{d + 1:02d}T{hour:02d}:30:00Z"


def round_robin(n):
    teams = list(range(1, n + 1))
    rounds = []
    for r in range(n - 1):
        pairs = []
        for i in range(n // 2):
            a, b = teams[i], teams[n - 1 - i]
            pairs.append((a, b) if (r + i) % 2 == 0 else (b, a))
        rounds.append(pairs)
        teams = [teams[0]] + [teams[-1]] + teams[1:-1]
    second = [[(b, a) for (a, b) in rnd] for rnd in rounds]
    return rounds + second


def split_total(rng, total, slots):
    counts = [0] * slots
    for _ in range(total):
        counts[rng.randrange(slots)] += 1
    return counts


def main():
    rng = random.Random(2025)
    os.makedirs(OUT, exist_ok=True)
    for f in os.listdir(OUT):
        if f.endswith(".json"):
            os.remove(os.path.join(OUT, f))

    team_ids = {t[0]: i + 1 for i, t in enumerate(TEAMS)}
    team_rows = []
    for (name, pos, pts, strength, w, d, l, short) in TEAMS:
        tid = team_ids[name]
        team_rows.append({
            "code": 100 + tid, "draw": d, "form": None, "id": tid, "loss": l, "name": name,
            "played": w + d + l, "points": pts, "position": pos, "short_name": short, "strength": strength,
            "team_division": None, "unavailable": False, "win": w,
            "strength_overall_home": 1000 + strength * 60, "strength_overall_away": 1000 + strength * 55,
            "strength_attack_home": 1000 + strength * 50, "strength_attack_away": 1000 + strength * 45,
            "strength_defence_home": 1000 + strength * 52, "strength_defence_away": 1000 + strength * 48,
            "pulse_id": 200 + tid,
        })

    schedule = round_robin(20)
    fixtures = []
    fid = 1
    for gw in range(1, TOTAL_GW + 1):
        for slot, (h, a) in enumerate(schedule[gw - 1]):
            finished = gw <= FINISHED_GW
            hs = rng.choice([0, 0, 1, 1, 1, 2, 2, 3, 4]) if finished else None
            as_ = rng.choice([0, 0, 1, 1, 2, 2, 3]) if finished else None
            fixtures.append({
                "code": 2444000 + fid, "event": gw, "finished": finished, "finished_provisional": finished,
                "id": fid, "kickoff_time": kickoff(gw, slot), "minutes": 90 if finished else 0,
                "provisional_start_time": False, "started": finished, "team_a": a, "team_a_score": as_,
                "team_h": h, "team_h_score": hs, "stats": [],
                "team_h_difficulty": TEAMS[a - 1][3], "team_a_difficulty": TEAMS[h - 1][3], "pulse_id": 115000 + fid,
            })
            fid += 1

    # FPL numbers players grouped by club in alphabetical club order.
    elements = []
    summaries = {}
    pid = 1
    for club in sorted(SQUADS):
        tid = team_ids[club]
        for (web, first, second, etype, goals) in SQUADS[club]:
            first_gw = JOINED.get(web, 1)
            last_gw = LEFT.get(web, FINISHED_GW)
            played_gws = [g for g in range(first_gw, last_gw + 1)]
            if goals is None:
                cap = {1: 0, 2: 4, 3: 12, 4: 12}[etype]
                goals = rng.randint(0, cap)
                if etype >= 3:
                    goals = max(goals, rng.randint(0, cap))
            assists = rng.randint(0, 3 if etype <= 2 else 11)
            yellow = rng.randint(0, 8)
            red = 1 if rng.random() < 0.06 else 0
            per_gw_min = []
            for g in played_gws:
                per_gw_min.append(rng.choice([90, 90, 90, 85, 78, 64, 45, 20, 0]) if web != "Milner" else rng.choice([0, 0, 12, 25, 45, 66]))
            minutes = sum(per_gw_min)
            goal_split = split_total(rng, goals, len(played_gws))
            assist_split = split_total(rng, assists, len(played_gws))
            yellow_split = split_total(rng, yellow, len(played_gws))
            red_split = split_total(rng, red, len(played_gws))
            cs_total = 0
            saves_total = 0
            pens_saved = 0
            history = []
            total_points = 0
            for i, g in enumerate(played_gws):
                fx = next(f for f in fixtures if f["event"] == g and tid in (f["team_h"], f["team_a"]))
                home = fx["team_h"] == tid
                conceded = fx["team_a_score"] if home else fx["team_h_score"]
                mins = per_gw_min[i]
                cs = 1 if (conceded == 0 and mins >= 60 and etype <= 3) else 0
                sv = rng.randint(0, 6) if (etype == 1 and mins > 0) else 0
                ps = 1 if (etype == 1 and mins > 0 and rng.random() < 0.05) else 0
                cs_total += cs
                saves_total += sv
                pens_saved += ps
                pts = 0
                if mins > 0:
                    pts += 2 if mins >= 60 else 1
                pts += goal_split[i] * {1: 10, 2: 6, 3: 5, 4: 4}[etype]
                pts += assist_split[i] * 3
                pts += cs * (4 if etype <= 2 else 1)
                pts -= yellow_split[i] + 3 * red_split[i]
                pts += sv // 3 + 5 * ps
                total_points += pts
                history.append({
                    "element": pid, "fixture": fx["id"], "opponent_team": fx["team_a"] if home else fx["team_h"],
                    "total_points": pts, "was_home": home, "kickoff_time": fx["kickoff_time"],
                    "team_h_score": fx["team_h_score"], "team_a_score": fx["team_a_score"], "round": g,
                    "modified": False, "minutes": mins, "goals_scored": goal_split[i], "assists": assist_split[i],
                    "clean_sheets": cs, "goals_conceded": conceded if mins > 0 else 0, "own_goals": 0,
                    "penalties_saved": ps, "penalties_missed": 0, "yellow_cards": yellow_split[i],
                    "red_cards": red_split[i], "saves": sv, "bonus": 0, "bps": max(pts * 3, 0),
                    "influence": f"{max(pts, 0) * 4.2:.1f}", "creativity": f"{assist_split[i] * 12.5:.1f}",
                    "threat": f"{goal_split[i] * 21.0:.1f}", "ict_index": f"{max(pts, 0) * 1.1:.1f}",
                    "starts": 1 if mins >= 60 else 0, "expected_goals": f"{goal_split[i] * 0.8:.2f}",
                    "expected_assists": f"{assist_split[i] * 0.7:.2f}", "expected_goal_involvements": "0.00",
                    "expected_goals_conceded": "1.10", "value": 50 + etype * 10, "transfers_balance": 0,
                    "selected": 100000 + pid * 37, "transfers_in": 0, "transfers_out": 0,
                })
            form = sum(h["total_points"] for h in history[-4:]) / 4.0 if history else 0.0
            future = []
            if web not in LEFT:
                for f in fixtures:
                    if f["event"] > FINISHED_GW and tid in (f["team_h"], f["team_a"]):
                        home = f["team_h"] == tid
                        opp = f["team_a"] if home else f["team_h"]
                        future.append({
                            "id": f["id"], "code": f["code"], "team_h": f["team_h"], "team_h_score": None,
                            "team_a": f["team_a"], "team_a_score": None, "event": f["event"], "finished": False,
                            "minutes": 0, "provisional_start_time": False, "kickoff_time": f["kickoff_time"],
                            "event_name": f"Gameweek {f['event']}", "is_home": home,
                            "difficulty": TEAMS[opp - 1][3],
                        })
            if web == "Milner":
                past = [{"season_name": s, "element_code": 15157, "start_cost": 55, "end_cost": 55,
                         "total_points": tp, "minutes": m, "goals_scored": g, "assists": a, "clean_sheets": c,
                         "goals_conceded": 0, "own_goals": 0, "penalties_saved": 0, "penalties_missed": 0,
                         "yellow_cards": 2, "red_cards": 0, "saves": 0, "bonus": 0, "bps": 0, "influence": "0.0",
                         "creativity": "0.0", "threat": "0.0", "ict_index": "0.0", "starts": 0,
                         "expected_goals": "0.00", "expected_assists": "0.00",
                         "expected_goal_involvements": "0.00", "expected_goals_conceded": "0.00"}
                        for (s, tp, m, g, a, c) in MILNER_HISTORY]
            else:
                seasons = rng.randint(0, 6) if web not in ("Haaland", "M.Salah") else 6
                past = []
                for k in range(seasons):
                    year = 2018 + (6 - seasons) + k
                    season = f"{year}/{(year + 1) % 100:02d}"
                    m = rng.randint(400, 3400)
                    g = rng.randint(0, 30 if etype == 4 else (20 if etype == 3 else 4))
                    if web == "Haaland" and year >= 2022:
                        g = {2022: 36, 2023: 27}[year]
                    if web == "M.Salah" and year >= 2022:
                        g = {2022: 19, 2023: 18}[year]
                    a = rng.randint(0, 14)
                    c = rng.randint(0, 15) if etype <= 3 else 0
                    past.append({"season_name": season, "element_code": 50000 + pid, "start_cost": 50, "end_cost": 52,
                                 "total_points": 2 * g + a * 3 + m // 45, "minutes": m, "goals_scored": g,
                                 "assists": a, "clean_sheets": c, "goals_conceded": rng.randint(0, 50),
                                 "own_goals": 0, "penalties_saved": rng.randint(0, 3) if etype == 1 else 0,
                                 "penalties_missed": 0, "yellow_cards": rng.randint(0, 9), "red_cards": 0,
                                 "saves": rng.randint(40, 130) if etype == 1 else 0, "bonus": rng.randint(0, 20),
                                 "bps": rng.randint(100, 800), "influence": "0.0", "creativity": "0.0",
                                 "threat": "0.0", "ict_index": "0.0", "starts": m // 90,
                                 "expected_goals": "0.00", "expected_assists": "0.00",
                                 "expected_goal_involvements": "0.00", "expected_goals_conceded": "0.00"})
            summaries[pid] = {"fixtures": future, "history": history, "history_past": past}
            elements.append({
                "chance_of_playing_next_round": None if web not in LEFT else 0,
                "chance_of_playing_this_round": None if web not in LEFT else 0,
                "code": 50000 + pid, "cost_change_event": 0, "cost_change_start": 0,
                "element_type": etype, "ep_next": f"{form:.1f}", "ep_this": f"{form:.1f}", "event_points": history[-1]["total_points"] if history else 0,
                "first_name": first, "form": f"{form:.1f}", "id": pid, "in_dreamteam": False,
                "news": "" if web not in LEFT else "Has joined another club", "news_added": None,
                "now_cost": 45 + etype * 10 + goals, "photo": f"{50000 + pid}.jpg",
                "points_per_game": f"{(total_points / max(len(played_gws), 1)):.1f}",
                "second_name": second, "selected_by_percent": f"{((pid * 7919) % 400) / 10.0:.1f}",
                "special": False, "squad_number": None, "status": "a" if web not in LEFT else "u",
                "team": tid, "team_code": 100 + tid, "total_points": total_points,
                "transfers_in": 0, "transfers_out": 0, "value_form": "0.0", "value_season": "0.0",
                "web_name": web, "minutes": minutes, "goals_scored": goals, "assists": assists,
                "clean_sheets": cs_total, "goals_conceded": 0, "own_goals": 0, "penalties_saved": pens_saved,
                "penalties_missed": 0, "yellow_cards": yellow, "red_cards": red, "saves": saves_total,
                "bonus": 0, "bps": 0, "influence": "0.0", "creativity": "0.0", "threat": "0.0",
                "ict_index": "0.0", "starts": sum(1 for m in per_gw_min if m >= 60),
                "expected_goals": "0.00", "expected_assists": "0.00",
            })
            pid += 1

    events = [{"id": gw, "name": f"Gameweek {gw}", "deadline_time": kickoff(gw, 0), "finished": gw <= FINISHED_GW,
               "is_current": gw == FINISHED_GW, "is_next": gw == FINISHED_GW + 1} for gw in range(1, TOTAL_GW + 1)]
    element_types = [{"id": k, "plural_name": v[0] + "s", "plural_name_short": v[1], "singular_name": v[0],
                      "singular_name_short": v[1], "squad_select": 2, "squad_min_play": 1, "squad_max_play": 5}
                     for k, v in POS_NAMES.items()]
    bootstrap = {"events": events, "game_settings": {"league_join_private_max": 30},
                 "phases": [{"id": 1, "name": "Overall", "start_event": 1, "stop_event": 38}],
                 "teams": team_rows, "total_players": 11250000, "elements": elements,
                 "element_stats": [{"label": "Minutes played", "name": "minutes"}],
                 "element_types": element_types}

    def dump(name, obj):
        with open(os.path.join(OUT, name), "w", encoding="utf-8") as fh:
            json.dump(obj, fh, ensure_ascii=False, separators=(",", ":"))
            fh.write("\n")

    dump("bootstrap-static.json", bootstrap)
    dump("fixtures.json", fixtures)
    files = ["bootstrap-static.json", "fixtures.json"]
    for p, s in summaries.items():
        name = f"element-summary_{p}.json"
        dump(name, s)
        files.append(name)
    with open(os.path.join(OUT, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump({"captured_at": CAPTURED_AT, "source": "https://fantasy.premierleague.com/api/",
                   "files": files}, fh, indent=1)
        fh.write("\n")
    print(f"wrote {len(files)} payloads to {os.path.normpath(OUT)}", file=sys.stderr)


if __name__ == "__main__":
    main()
