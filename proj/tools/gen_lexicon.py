#!/usr/bin/env python3
# Copyright 2026 The SumGD Engine Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates data/lexicon.tsv from the word lists below.

Each output line is `word<TAB>TAG` with the word's most frequent universal
POS tag in caption-style English. Inflections of regular verbs and nouns are
expanded here so the tagger itself stays a plain lookup.
"""
import json
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent

CLOSED = {
    "DET": "a an the this that these those each every some any no another "
           "either neither all both such what which whose".split(),
    "PRON": "i you he she it we they me him her us them my your his its our "
            "their mine yours hers ours theirs myself yourself himself herself "
            "itself ourselves themselves who whom someone somebody something "
            "anyone anybody anything everyone everybody everything nobody "
            "nothing".split(),
    "ADP": "in on at by with from to of for about above below under over near "
           "beside besides between behind beneath along across through into "
           "onto upon within without around among against toward towards "
           "during after before inside outside off like past via atop "
           "underneath throughout amid than".split(),
    "AUX": "is are was were be been being am 's 're 'm has have had having "
           "do does did will would shall should can could may might must "
           "wo ca".split(),
    "CCONJ": "and or but nor yet plus".split(),
    "SCONJ": "if because while although though whereas since unless until "
             "whether as so that".split(),
    "PART": "not n't to 's".split(),
    "ADV": "very also too quite rather just only even still really almost "
           "here there where when why how now then again always never often "
           "sometimes perhaps probably possibly slightly closely nearby "
           "together apart away back down up out forward overall likely "
           "somewhat mostly partially fully directly neatly brightly "
           "clearly carefully mainly primarily additionally however "
           "instead else maybe further more most less least".split(),
    "INTJ": "oh wow hey yes hello please".split(),
    "NUM": "zero one two three four five six seven eight nine ten eleven twelve "
           "thirteen fourteen fifteen sixteen seventeen eighteen nineteen "
           "twenty thirty forty fifty sixty seventy eighty ninety hundred "
           "thousand million dozen first second third".split(),
}

ADJECTIVES = (
    "red blue green yellow orange purple pink brown black white gray grey "
    "silver golden gold beige colorful dark light bright pale small large big "
    "little tiny huge giant tall short long wide narrow thick thin heavy "
    "round square rectangular flat wooden metal metallic plastic glass "
    "young old new ancient modern open closed empty full busy quiet sunny "
    "cloudy snowy rainy wet dry clean dirty fresh ripe hot cold warm cool "
    "happy sad smiling calm lush grassy sandy rocky urban rural outdoor "
    "indoor main several many few various different other same similar "
    "single multiple entire whole top bottom front rear left right middle "
    "central nearby distant visible striped spotted fluffy furry shiny "
    "soft hard smooth rough sharp blurry cozy elegant vintage casual formal "
    "professional delicious tasty healthy green leafy wild domestic "
    "electric digital wooden stone brick marble ceramic cardboard paper "
    "leather cotton wool denim plaid floral fancy simple plain decorative "
    "crowded empty scenic natural beautiful pretty cute ugly lovely "
    "interesting unusual typical traditional rustic ornate".split())

VERBS = (
    "sit stand walk run ride hold carry wear eat drink look watch play fly "
    "throw catch kick hit swing jump climb lie rest wait park drive cross "
    "lean hang cover fill surround face point reach cut cook serve pour "
    "read write talk smile laugh sleep lay place display show feature "
    "appear seem contain include hold grab pull push open close travel "
    "approach follow lead graze swim surf ski skate snowboard paddle "
    "pose gather line stack arrange decorate light shine reflect float "
    "sail dock land taxi board wash brush groom feed pet chase bite "
    "prepare slice bake fry grill sell buy shop stroll hike explore "
    "enjoy relax work type use share pass move turn stop head line "
    "perch stretch extend block fence overlook belong keep set put".split())

IRREGULAR = {
    "sit": ["sits", "sat", "sitting"], "stand": ["stands", "stood", "standing"],
    "run": ["runs", "ran", "running"], "ride": ["rides", "rode", "riding", "ridden"],
    "hold": ["holds", "held", "holding"], "wear": ["wears", "wore", "wearing", "worn"],
    "eat": ["eats", "ate", "eating", "eaten"], "drink": ["drinks", "drank", "drinking"],
    "fly": ["flies", "flew", "flying", "flown"], "throw": ["throws", "threw", "throwing", "thrown"],
    "catch": ["catches", "caught", "catching"], "hit": ["hits", "hitting"],
    "swing": ["swings", "swung", "swinging"], "lie": ["lies", "lay", "lying"],
    "drive": ["drives", "drove", "driving", "driven"], "hang": ["hangs", "hung", "hanging"],
    "cut": ["cuts", "cutting"], "read": ["reads", "reading"], "write": ["writes", "wrote", "writing", "written"],
    "sleep": ["sleeps", "slept", "sleeping"], "lay": ["lays", "laid", "laying"],
    "show": ["shows", "showed", "showing", "shown"], "grab": ["grabs", "grabbed", "grabbing"],
    "swim": ["swims", "swam", "swimming"], "bite": ["bites", "bit", "biting", "bitten"],
    "buy": ["buys", "bought", "buying"], "put": ["puts", "putting"], "set": ["sets", "setting"],
    "keep": ["keeps", "kept", "keeping"], "lead": ["leads", "led", "leading"],
    "make": ["makes", "made", "making"], "take": ["takes", "took", "taking", "taken"],
    "see": ["sees", "saw", "seeing", "seen"], "go": ["goes", "went", "going", "gone"],
    "get": ["gets", "got", "getting"], "give": ["gives", "gave", "giving", "given"],
    "shine": ["shines", "shone", "shining"], "feed": ["feeds", "fed", "feeding"],
    "swing": ["swings", "swung", "swinging"], "plan": ["plans", "planned", "planning"],
    "shop": ["shops", "shopped", "shopping"], "stop": ["stops", "stopped", "stopping"],
    "chase": ["chases", "chased", "chasing"], "skate": ["skates", "skated", "skating"],
}

NOUNS = (
    "man woman person people child children boy girl baby kid kids player "
    "players guy lady men women crowd family couple friend group team "
    "dog cat horse sheep cow cows elephant bear zebra giraffe bird birds "
    "car truck bus train motorcycle bicycle bike airplane plane boat ship "
    "traffic light fire hydrant stop sign parking meter bench chair couch "
    "sofa bed table desk toilet tv television laptop computer mouse remote "
    "keyboard phone cellphone microwave oven toaster sink refrigerator fridge "
    "book clock vase scissors teddy hair drier toothbrush bottle cup glass "
    "fork knife spoon bowl banana apple sandwich orange broccoli carrot hot "
    "pizza donut doughnut cake umbrella handbag bag purse tie suitcase "
    "luggage frisbee skis snowboard ball kite bat glove skateboard surfboard "
    "racket backpack plate food meal dish table street road sidewalk "
    "building buildings house window door wall floor ceiling room kitchen "
    "bathroom bedroom field grass tree trees sky cloud clouds water ocean sea "
    "beach sand snow mountain hill park city area background foreground "
    "scene image picture photo view side top front edge corner shirt hat "
    "jacket helmet shorts pants dress shoes cap uniform sign pole fence "
    "lamp light shelf counter cabinet mirror curtain towel rug pillow "
    "blanket plant flower flowers leaf leaves rock rocks wave waves lake "
    "river bridge tower track tracks platform station airport runway "
    "market store shop restaurant cafe vegetables fruit fruits bread "
    "cheese meat salad coffee tea wine drink box basket cart wheel "
    "tire seat handle screen game match court tennis baseball soccer "
    "surfer skier rider driver animal animals herd flock pen paper "
    "desk chair object objects item items thing things display area "
    "day night time moment distance middle center left right way "
    "collection variety lot number pair piece slice top bottom".split())

IRREGULAR_PLURAL = {"man": "men", "woman": "women", "person": "people",
                    "child": "children", "mouse": "mice", "knife": "knives",
                    "leaf": "leaves", "shelf": "shelves", "sheep": "sheep",
                    "bus": "buses", "glass": "glasses", "box": "boxes",
                    "dish": "dishes", "sandwich": "sandwiches",
                    "couch": "couches", "bench": "benches", "match": "matches",
                    "toothbrush": "toothbrushes", "brush": "brushes",
                    "giraffe": "giraffes", "sky": "skies", "city": "cities",
                    "family": "families", "lady": "ladies", "baby": "babies",
                    "party": "parties", "strawberry": "strawberries",
                    "tomato": "tomatoes", "potato": "potatoes"}


def verb_forms(v):
    if v in IRREGULAR:
        return [v] + IRREGULAR[v]
    if v.endswith("e"):
        return [v, v + "s", v + "d", v[:-1] + "ing"]
    if v.endswith(("s", "sh", "ch", "x")):
        return [v, v + "es", v + "ed", v + "ing"]
    if v.endswith("y") and v[-2] not in "aeiou":
        return [v, v[:-1] + "ies", v[:-1] + "ied", v + "ing"]
    return [v, v + "s", v + "ed", v + "ing"]


def plural(n):
    if n in IRREGULAR_PLURAL:
        return IRREGULAR_PLURAL[n]
    if n.endswith(("s", "sh", "ch", "x", "z")):
        return n + "es"
    if n.endswith("y") and n[-2] not in "aeiou":
        return n[:-1] + "ies"
    return n + "s"


def main():
    lex = {}

    def put(word, tag, override=False):
        word = word.lower()
        if override or word not in lex:
            lex[word] = tag

    # Closed classes take precedence over open-class inflections.
    for tag, words in CLOSED.items():
        for w in words:
            put(w, tag)
    vocab = json.loads((ROOT / "data" / "coco_vocab.json").read_text())
    for category, synonyms in vocab.items():
        for phrase in [category] + synonyms:
            for w in phrase.split():
                put(w, "NOUN")
                put(plural(w), "NOUN")
    for n in NOUNS:
        put(n, "NOUN")
        put(plural(n), "NOUN")
    for a in ADJECTIVES:
        put(a, "ADJ")
    for v in VERBS:
        for i, form in enumerate(verb_forms(v)):
            # A bare or -s form that is already a noun stays a noun.
            put(form, "VERB", override=(i >= 2 and form in lex and lex[form] == "NOUN"))
    out = ROOT / "data" / "lexicon.tsv"
    with out.open("w") as f:
        f.write("# word<TAB>universal POS tag; lowercase; generated by tools/gen_lexicon.py\n")
        for w in sorted(lex):
            f.write(f"{w}\t{lex[w]}\n")
    print(f"wrote {len(lex)} entries to {out}", file=sys.stderr)


if __name__ == "__main__":
    main()
