"""Writes the synthetic incident datasets (en, nl) and the noisy mock scripts.

Run from this directory: python3 make_datasets.py
Output is deterministic.
"""
import json

SEVERITY = ["low", "medium", "high", "critical"]


def enum(desc, values):
    return {"description": desc, "enum": values}


def typed(desc, t):
    return {"description": desc, "type": t}


def tool(name, desc, params):
    return {"name": name, "description": desc,
            "parameters": [dict(name=k, **v) for k, v in params]}


def tools(lang):
    d = DESCRIPTIONS[lang]
    return [
        tool("record_incident", d["record_incident"], [
            ("incident_type", enum(d["incident_type"], ["fire", "smoke", "overheating", "flooding", "intrusion"])),
            ("fire_height_m", typed(d["fire_height_m"], "number")),
            ("fire_material_type", enum(d["fire_material_type"], ["battery", "cable", "plastic", "paper", "wood"])),
            ("location", typed(d["location"], "string")),
            ("severity", enum(d["severity"], SEVERITY)),
            ("people_present", typed(d["people_present"], "boolean")),
        ]),
        tool("report_water_leak", d["report_water_leak"], [
            ("location", typed(d["location"], "string")),
            ("source", enum(d["source"], ["pipe", "cooling_unit", "roof", "unknown"])),
            ("leak_rate", enum(d["leak_rate"], ["drip", "steady", "gushing"])),
            ("rack_affected", typed(d["rack_affected"], "boolean")),
            ("severity", enum(d["severity"], SEVERITY)),
        ]),
        tool("report_power_failure", d["report_power_failure"], [
            ("location", typed(d["location"], "string")),
            ("scope", enum(d["scope"], ["rack", "row", "room", "building"])),
            ("ups_active", typed(d["ups_active"], "boolean")),
            ("duration_min", typed(d["duration_min"], "number")),
            ("severity", enum(d["severity"], SEVERITY)),
        ]),
        tool("request_assistance", d["request_assistance"], [
            ("team", enum(d["team"], ["fire_brigade", "security", "maintenance", "medical"])),
            ("location", typed(d["location"], "string")),
            ("urgency", enum(d["urgency"], ["routine", "urgent", "emergency"])),
        ]),
        tool("show_incidents", d["show_incidents"], [
            ("status", enum(d["status"], ["open", "closed", "all"])),
            ("location", typed(d["location"], "string")),
        ]),
        tool("close_incident", d["close_incident"], [
            ("incident_id", typed(d["incident_id"], "integer")),
            ("resolution", typed(d["resolution"], "string")),
        ]),
    ]


DESCRIPTIONS = {
    "en": {
        "record_incident": "Record an incident such as a fire, smoke or overheating",
        "incident_type": "Kind of incident",
        "fire_height_m": "Height of the fire in meters",
        "fire_material_type": "Material that is burning",
        "location": "Where in the data center, e.g. a rack, row or room",
        "severity": "How serious the incident is",
        "people_present": "Whether people are present at the location",
        "report_water_leak": "Report a water leak",
        "source": "Where the water comes from",
        "leak_rate": "How fast the water leaks",
        "rack_affected": "Whether equipment racks are wet",
        "report_power_failure": "Report a power failure",
        "scope": "How much of the data center lost power",
        "ups_active": "Whether the UPS took over",
        "duration_min": "Duration of the outage in minutes",
        "request_assistance": "Call a team for help",
        "team": "Team to call",
        "urgency": "How quickly the team must come",
        "show_incidents": "Show the list of incidents",
        "status": "Which incidents to show",
        "close_incident": "Close an incident",
        "incident_id": "Number of the incident",
        "resolution": "How the incident was resolved",
    },
    "nl": {
        "record_incident": "Registreer een incident zoals brand, rook of oververhitting",
        "incident_type": "Soort incident",
        "fire_height_m": "Hoogte van de brand in meters",
        "fire_material_type": "Materiaal dat brandt",
        "location": "Plek in het datacenter, bijvoorbeeld een rack, rij of ruimte",
        "severity": "Hoe ernstig het incident is",
        "people_present": "Of er mensen aanwezig zijn op de locatie",
        "report_water_leak": "Meld een waterlek",
        "source": "Waar het water vandaan komt",
        "leak_rate": "Hoe snel het water lekt",
        "rack_affected": "Of er racks nat zijn geworden",
        "report_power_failure": "Meld een stroomstoring",
        "scope": "Welk deel van het datacenter zonder stroom zit",
        "ups_active": "Of de UPS het heeft overgenomen",
        "duration_min": "Duur van de storing in minuten",
        "request_assistance": "Roep een team op voor hulp",
        "team": "Team dat moet komen",
        "urgency": "Hoe snel het team moet komen",
        "show_incidents": "Toon de lijst met incidenten",
        "status": "Welke incidenten getoond worden",
        "close_incident": "Sluit een incident af",
        "incident_id": "Nummer van het incident",
        "resolution": "Hoe het incident is opgelost",
    },
}

HEIGHT = {"fire_height_m": {"numeric_range": None}}

# (tool, arguments, english utterance, dutch utterance, dutch string overrides)
CASES = [
    ("record_incident", {"incident_type": "fire", "fire_height_m": 1.0, "fire_material_type": "battery", "location": "rack B12", "severity": "high"},
     "There's a fire in rack B12, a power cell is burning, the flames reach halfway up the rack, this is serious",
     "Er is brand in rack B12, een accu staat in brand, de vlammen komen tot halverwege het rack, dit is ernstig", {}),
    ("record_incident", {"incident_type": "fire", "location": "rack A3"},
     "Fire in rack A3", "Brand in rack A3", {}),
    ("record_incident", {"incident_type": "smoke", "location": "row C"},
     "I see smoke coming from row C", "Ik zie rook uit rij C komen", {"location": "rij C"}),
    ("record_incident", {"incident_type": "fire", "fire_material_type": "cable", "fire_height_m": 0.3},
     "A cable is on fire, about thirty centimeters high", "Er staat een kabel in brand, ongeveer dertig centimeter hoog", {}),
    ("record_incident", {"incident_type": "overheating", "location": "rack D7", "severity": "medium"},
     "Rack D7 is overheating, medium severity", "Rack D7 raakt oververhit, gemiddelde ernst", {}),
    ("record_incident", {"incident_type": "fire", "fire_height_m": 2.0},
     "The fire is two meters high", "De brand is twee meter hoog", {}),
    ("record_incident", {"incident_type": "fire", "fire_height_m": 3.0},
     "Flames of two meters, no, three meters", "Vlammen van twee meter, nee, drie meter", {}),
    ("record_incident", {"incident_type": "fire", "location": "rack B14"},
     "Fire in rack B12, sorry, B14", "Brand in rack B12, sorry, B14", {}),
    ("record_incident", {"people_present": True, "incident_type": "smoke"},
     "There is smoke and there are people in the room", "Er is rook en er zijn mensen in de ruimte", {}),
    ("record_incident", {"people_present": False, "incident_type": "fire", "location": "server room 2"},
     "Fire in server room 2, nobody is inside", "Brand in serverruimte 2, er is niemand binnen", {"location": "serverruimte 2"}),
    ("record_incident", {"incident_type": "fire", "fire_material_type": "plastic", "severity": "critical"},
     "Plastic is burning, this is critical", "Er brandt plastic, dit is kritiek", {}),
    ("record_incident", {"incident_type": "fire", "fire_material_type": "paper", "fire_height_m": 0.5, "location": "office 1"},
     "Some paper caught fire in office 1, half a meter high", "Er is wat papier in brand gevlogen in kantoor 1, een halve meter hoog", {"location": "kantoor 1"}),
    ("record_incident", {"incident_type": "intrusion", "location": "loading dock", "severity": "high"},
     "Someone broke in at the loading dock, high severity", "Iemand heeft ingebroken bij het laadperron, hoge ernst", {"location": "laadperron"}),
    ("record_incident", {"incident_type": "flooding", "location": "basement"},
     "The basement is flooding", "De kelder loopt onder water", {"location": "kelder"}),
    ("record_incident", {"incident_type": "fire", "fire_material_type": "battery", "location": "UPS room"},
     "Batteries are burning in the UPS room", "Er staan accu's in brand in de UPS-ruimte", {"location": "UPS-ruimte"}),
    ("record_incident", {"incident_type": "overheating", "severity": "low"},
     "Slight overheating, low priority", "Lichte oververhitting, lage prioriteit", {}),
    ("record_incident", {"severity": "high"},
     "Set the severity to high", "Zet de ernst op hoog", {}),
    ("record_incident", {"severity": "critical"},
     "Make it medium, no wait, critical", "Maak het gemiddeld, nee wacht, kritiek", {}),
    ("record_incident", {"incident_type": "fire", "fire_height_m": 1.5, "fire_material_type": "wood"},
     "A wooden pallet is burning, flames one and a half meters", "Er brandt een houten pallet, vlammen van anderhalve meter", {}),
    ("record_incident", {"incident_type": "smoke", "location": "rack F1", "people_present": True},
     "Smoke at rack F1, two technicians are there", "Rook bij rack F1, er zijn twee monteurs", {}),
    ("record_incident", {"location": "rack C9"},
     "The location is rack C9", "De locatie is rack C9", {}),
    ("record_incident", {"incident_type": "fire", "fire_height_m": 1.0, "location": "rack E2"},
     "Fire in rack E2, flames about as high as a desk", "Brand in rack E2, vlammen ongeveer zo hoog als een bureau", {}),
    ("record_incident", {"incident_type": "fire", "fire_material_type": "cable"},
     "The wiring is on fire", "De bekabeling staat in brand", {}),
    ("record_incident", {"incident_type": "overheating", "location": "row A", "people_present": False},
     "Row A overheats, no one around", "Rij A raakt oververhit, niemand in de buurt", {"location": "rij A"}),
    ("record_incident", {"incident_type": "fire", "severity": "critical", "people_present": True, "location": "hall 3"},
     "Critical fire in hall 3 with people inside", "Kritieke brand in hal 3 met mensen binnen", {"location": "hal 3"}),
    ("record_incident", {"fire_height_m": 0.2},
     "Flame height twenty centimeters", "Vlamhoogte twintig centimeter", {}),
    ("report_water_leak", {"location": "row B", "source": "pipe"},
     "Water is leaking from a pipe in row B", "Er lekt water uit een leiding in rij B", {"location": "rij B"}),
    ("report_water_leak", {"source": "cooling_unit", "leak_rate": "drip"},
     "The cooling unit is dripping", "De koelunit druppelt", {}),
    ("report_water_leak", {"leak_rate": "gushing", "rack_affected": True, "severity": "critical"},
     "Water is gushing onto the racks, critical", "Het water gutst op de racks, kritiek", {}),
    ("report_water_leak", {"location": "server room 1", "source": "roof", "leak_rate": "steady"},
     "Steady leak through the roof of server room 1", "Gestaag lek door het dak van serverruimte 1", {"location": "serverruimte 1"}),
    ("report_water_leak", {"rack_affected": False, "location": "corridor"},
     "Leak in the corridor, the racks are dry", "Lek in de gang, de racks zijn droog", {"location": "gang"}),
    ("report_water_leak", {"source": "unknown", "severity": "medium"},
     "Water on the floor, no idea where from, medium severity", "Water op de vloer, geen idee waarvandaan, gemiddelde ernst", {}),
    ("report_water_leak", {"leak_rate": "steady"},
     "It's a drip, actually more of a steady stream", "Het druppelt, eigenlijk meer een gestage stroom", {}),
    ("report_water_leak", {"location": "rack G4", "rack_affected": True, "source": "cooling_unit"},
     "Rack G4 got wet from the cooling unit", "Rack G4 is nat geworden door de koelunit", {}),
    ("report_power_failure", {"scope": "row", "location": "row D"},
     "Row D lost power", "Rij D heeft geen stroom meer", {"location": "rij D"}),
    ("report_power_failure", {"scope": "building", "ups_active": True},
     "Power is out in the whole building, the UPS kicked in", "De stroom is uitgevallen in het hele gebouw, de UPS heeft het overgenomen", {}),
    ("report_power_failure", {"duration_min": 15, "scope": "rack", "location": "rack A1"},
     "Rack A1 was without power for fifteen minutes", "Rack A1 zat een kwartier zonder stroom", {}),
    ("report_power_failure", {"ups_active": False, "severity": "critical"},
     "The UPS did not start, this is critical", "De UPS is niet gestart, dit is kritiek", {}),
    ("report_power_failure", {"scope": "room", "location": "server room 3", "duration_min": 5},
     "Server room 3 had a five minute outage", "Serverruimte 3 had een storing van vijf minuten", {"location": "serverruimte 3"}),
    ("report_power_failure", {"duration_min": 30},
     "The outage lasted twenty minutes, no, half an hour", "De storing duurde twintig minuten, nee, een half uur", {}),
    ("report_power_failure", {"scope": "row", "severity": "low"},
     "Minor power issue in one row", "Klein stroomprobleem in een rij", {}),
    ("report_power_failure", {"location": "rack H2", "ups_active": True, "duration_min": 2, "severity": "medium"},
     "Rack H2 lost power for two minutes on UPS, medium severity", "Rack H2 viel twee minuten terug op de UPS, gemiddelde ernst", {}),
    ("request_assistance", {"team": "fire_brigade", "urgency": "emergency"},
     "Call the fire brigade, now!", "Bel de brandweer, nu!", {}),
    ("request_assistance", {"team": "security", "location": "loading dock"},
     "Send security to the loading dock", "Stuur de beveiliging naar het laadperron", {"location": "laadperron"}),
    ("request_assistance", {"team": "maintenance", "urgency": "routine"},
     "Ask maintenance to come by when they can", "Vraag onderhoud om langs te komen als het uitkomt", {}),
    ("request_assistance", {"team": "medical", "location": "hall 2", "urgency": "urgent"},
     "We need a medic in hall 2 quickly", "We hebben snel een arts nodig in hal 2", {"location": "hal 2"}),
    ("request_assistance", {"team": "security"},
     "Get maintenance, sorry, security", "Haal onderhoud, sorry, beveiliging", {}),
    ("request_assistance", {"team": "fire_brigade", "location": "rack B12"},
     "The firemen must go to rack B12", "De brandweerlieden moeten naar rack B12", {}),
    ("show_incidents", {"status": "open"},
     "Show me the open incidents", "Laat de openstaande incidenten zien", {}),
    ("show_incidents", {"status": "all"},
     "List all incidents", "Toon alle incidenten", {}),
    ("show_incidents", {"status": "closed", "location": "row C"},
     "Which incidents in row C are closed?", "Welke incidenten in rij C zijn gesloten?", {"location": "rij C"}),
    ("show_incidents", {},
     "Show the incidents", "Toon de incidenten", {}),
    ("close_incident", {"incident_id": 42},
     "Close incident 42", "Sluit incident 42", {}),
    ("close_incident", {"incident_id": 17, "resolution": "replaced the cable"},
     "Close number 17, we replaced the cable", "Sluit nummer 17 af, de kabel is vervangen", {"resolution": "kabel vervangen"}),
    ("close_incident", {"incident_id": 8},
     "Close incident 3, no, 8", "Sluit incident 3, nee, 8", {}),
]


def matchers(args):
    m = {}
    if "fire_height_m" in args:
        h = args["fire_height_m"]
        m["fire_height_m"] = {"numeric_range": [round(max(0.0, h - 0.5), 3), round(h + 0.5, 3)]}
    return m


def cases(lang):
    specs = tools(lang)
    out = []
    for i, (name, args, en, nl, nl_over) in enumerate(CASES, start=1):
        a = dict(args)
        if lang == "nl":
            a.update(nl_over)
        out.append({
            "id": f"{lang}-{i:02d}",
            "language": lang,
            "utterance": en if lang == "en" else nl,
            "tools": specs,
            "ideal": {"name": name, "arguments": a},
            "matchers": matchers(a),
        })
    return out


WRONG_ENUM = {"battery": "power cell", "cable": "wire", "high": "High", "critical": "very high",
              "pipe": "pipes", "row": "aisle", "security": "guards", "open": "opened", "fire": "flames",
              "smoke": "smoking", "overheating": "heat", "drip": "dripping", "steady": "constant",
              "cooling_unit": "cooler", "fire_brigade": "firemen", "emergency": "asap", "medium": "moderate",
              "maintenance": "maintenance team", "routine": "normal", "all": "every", "closed": "done",
              "building": "site", "room": "hall", "rack": "cabinet", "plastic": "plastics", "paper": "papers",
              "wood": "wooden", "low": "minor", "urgent": "quick", "medical": "medic", "flooding": "flood",
              "intrusion": "break-in", "unknown": "?", "roof": "ceiling", "gushing": "fast",
              }


def noisy_reply(case, i):
    """Deterministic faults by case position."""
    ideal = case["ideal"]
    args = dict(ideal["arguments"])
    tool = next(t for t in case["tools"] if t["name"] == ideal["name"])
    enums = [p["name"] for p in tool["parameters"] if "enum" in p and p["name"] in args]
    kind = i % 8
    if kind == 1 and enums:
        p = enums[0]
        args[p] = WRONG_ENUM.get(args[p], args[p] + "s")
    elif kind == 2 and args:
        del args[sorted(args)[0]]
    elif kind == 3:
        extra = next(p["name"] for p in tool["parameters"] if p["name"] not in args) if len(args) < len(tool["parameters"]) else None
        if extra:
            p = next(p for p in tool["parameters"] if p["name"] == extra)
            args[extra] = p["enum"][0] if "enum" in p else {"number": 1, "integer": 1, "boolean": True}.get(p.get("type"), "somewhere")
    elif kind == 4:
        return {"call": {"name": "show_incidents" if ideal["name"] != "show_incidents" else "record_incident", "arguments": args}}
    elif kind == 5:
        for k, v in list(args.items()):
            if isinstance(v, (int, float)) and not isinstance(v, bool):
                args[k] = str(v)
                break
    elif kind == 6 and i % 16 == 6:
        return {"text": "Could you tell me more?"}
    elif kind == 7 and i % 24 == 7:
        return {"fail": "connection reset"}
    return {"call": {"name": ideal["name"], "arguments": args}}


def dump(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    assert len(CASES) == 55, len(CASES)
    for lang in ("en", "nl"):
        cs = cases(lang)
        dump(f"incidents_{lang}.jsonl", cs)
        dump(f"noisy_{lang}.jsonl", [{"utterance": c["utterance"], "reply": noisy_reply(c, i)} for i, c in enumerate(cs)])
