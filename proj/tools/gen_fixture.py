#!/usr/bin/env python3
"""Generate the bundled mini-corpus: comment/post dumps plus a tagged corpus.

Every community draws sentences from one shared grammar but with its own
template preferences, punctuation habits and topic lexicon. The tagged
corpus is drawn from the same grammar so the tagger sees the same words.
"""

import argparse
import json
import os
import random

SHARED = {
    "DT": ["the", "a", "this", "that", "every", "some"],
    "PRP": ["i", "you", "he", "she", "we", "they"],
    "PRP$": ["my", "your", "his", "her", "our", "their"],
    "MD": ["can", "could", "will", "would", "should", "might"],
    "IN": ["in", "on", "of", "for", "with", "about", "from", "at", "by"],
    "CC": ["and", "but", "or"],
    "RB": ["really", "just", "very", "also", "never", "always", "probably", "actually"],
    "TO": ["to"],
    "UH": ["lol", "yeah", "wow", "oh", "well"],
    "WRB": ["why", "how", "when", "where"],
    "WP": ["what", "who"],
    "EX": ["there"],
    "CD": ["two", "three", "10", "100", "2015"],
    "VBZ": ["is", "has", "seems", "looks", "makes"],
    "VBP": ["are", "have", "think", "know", "feel"],
    "VBD": ["was", "were", "said", "saw", "sat", "made", "thought"],
    "VB": ["be", "see", "get", "make", "know", "say"],
    "VBG": ["going", "thinking", "looking", "trying"],
    "VBN": ["seen", "done", "made", "been"],
    "JJ": ["good", "bad", "great", "new", "old", "big", "small", "interesting", "true"],
    "JJR": ["better", "worse", "bigger"],
    "JJS": ["best", "worst"],
    "NN": ["cat", "thing", "time", "way", "point", "idea", "day", "man", "world", "story"],
    "NNS": ["things", "people", "days", "ideas", "years"],
    "NNP": ["john", "reddit", "america"],
    "RP": ["up", "out"],
}

TOPICS = {
    "askscience": {
        "NN": ["energy", "light", "cell", "planet", "theory", "experiment", "atom", "gravity"],
        "NNS": ["particles", "cells", "stars", "molecules", "experiments"],
        "JJ": ["quantum", "chemical", "thermal", "solar", "genetic"],
        "VB": ["measure", "observe", "explain", "test"],
        "VBG": ["measuring", "observing", "testing"],
        "NNP": ["nasa", "einstein", "mars"],
    },
    "gaming": {
        "NN": ["game", "level", "boss", "controller", "console", "patch", "server", "quest"],
        "NNS": ["games", "players", "levels", "bosses", "mods"],
        "JJ": ["multiplayer", "epic", "laggy", "broken", "casual"],
        "VB": ["play", "beat", "grind", "respawn"],
        "VBG": ["playing", "grinding", "streaming"],
        "NNP": ["nintendo", "steam", "xbox"],
    },
    "politics": {
        "NN": ["election", "vote", "senate", "policy", "candidate", "campaign", "tax", "law"],
        "NNS": ["voters", "senators", "policies", "taxes", "laws"],
        "JJ": ["political", "liberal", "conservative", "federal", "partisan"],
        "VB": ["vote", "elect", "repeal", "campaign"],
        "VBG": ["voting", "campaigning", "lobbying"],
        "NNP": ["obama", "congress", "clinton"],
    },
    "worldnews": {
        "NN": ["government", "war", "policy", "country", "treaty", "election", "border", "crisis"],
        "NNS": ["countries", "refugees", "governments", "sanctions", "laws"],
        "JJ": ["international", "foreign", "political", "military", "economic"],
        "VB": ["invade", "negotiate", "sanction", "vote"],
        "VBG": ["negotiating", "fighting", "voting"],
        "NNP": ["russia", "europe", "china"],
    },
    "funny": {
        "NN": ["joke", "dog", "prank", "meme", "face", "reaction"],
        "NNS": ["jokes", "dogs", "memes", "puns"],
        "JJ": ["hilarious", "funny", "dumb", "weird"],
        "VB": ["laugh", "prank", "joke"],
        "VBG": ["laughing", "crying", "joking"],
        "NNP": ["bob", "gary"],
    },
    "movies": {
        "NN": ["movie", "film", "actor", "scene", "director", "sequel", "trailer"],
        "NNS": ["movies", "films", "actors", "scenes"],
        "JJ": ["cinematic", "boring", "classic", "dramatic"],
        "VB": ["watch", "film", "direct"],
        "VBG": ["watching", "filming", "directing"],
        "NNP": ["hollywood", "spielberg", "marvel"],
    },
    "music": {
        "NN": ["song", "album", "band", "guitar", "concert", "track", "drummer"],
        "NNS": ["songs", "albums", "bands", "lyrics"],
        "JJ": ["acoustic", "catchy", "loud", "melodic"],
        "VB": ["listen", "sing", "record"],
        "VBG": ["listening", "singing", "recording"],
        "NNP": ["beyonce", "spotify", "nirvana"],
    },
}

# Literal items are written as word/TAG.
TEMPLATES = [
    "DT NN VBZ JJ",
    "PRP VBP DT NNS IN DT NN",
    "PRP VBD DT JJ NN IN NNP",
    "WRB VBZ DT NN JJ ?",
    "PRP MD VB DT NN , CC PRP VBP RB JJ",
    "UH , DT NN VBZ RB JJ",
    "EX VBZ DT JJ NN IN DT NNS",
    "PRP VBP TO VB DT NNS",
    "PRP$ NN VBD PRP VBP JJR NNS",
    "DT NNS VBP RB VBG IN NNP",
    "PRP VBP PRP VBZ DT JJS NN",
    "PRP do/VBP n't/RB VB DT NN VBZ JJ",
    "it/PRP 's/VBZ RB JJ",
    "NNP 's/POS NN VBZ JJ",
    "CD NNS VBD RP IN DT NN",
    "WP VBZ DT JJ NN ?",
    "DT NN is/VBZ n't/RB JJ , PRP VBP",
    "PRP VBD DT NN VBN IN DT NNS",
]

STYLES = {
    "askscience": {"weights": [3, 4, 4, 4, 3, 0.2, 4, 3, 1, 2, 2, 1, 0.5, 1, 3, 4, 1, 3], "ends": {".": 9, "?": 1},
                   "uh": 0.02, "sentences": (2, 4), "url": 0.05},
    "gaming": {"weights": [3, 2, 1, 1, 2, 3, 1, 3, 2, 3, 3, 3, 3, 1, 1, 1, 2, 1], "ends": {"!": 4, ".": 4, "!!": 2},
               "uh": 0.3, "sentences": (1, 3), "url": 0.02},
    "politics": {"weights": [2, 3, 3, 2, 4, 1, 2, 2, 2, 2, 2, 4, 2, 3, 1, 2, 4, 2], "ends": {".": 6, "...": 3, "?": 1},
                 "uh": 0.05, "sentences": (2, 4), "url": 0.08},
    "worldnews": {"weights": [2, 3, 3, 2, 4, 1, 2, 2, 2, 2, 2, 3, 2, 3, 1, 2, 4, 2], "ends": {".": 7, "...": 2, "?": 1},
                  "uh": 0.04, "sentences": (2, 4), "url": 0.1},
    "funny": {"weights": [2, 1, 2, 1, 1, 5, 1, 2, 2, 1, 3, 2, 4, 2, 1, 1, 1, 1], "ends": {"!": 5, "!!": 3, ".": 2},
              "uh": 0.5, "sentences": (1, 2), "url": 0.03},
    "movies": {"weights": [4, 2, 3, 1, 2, 2, 2, 2, 3, 2, 4, 2, 2, 2, 1, 1, 2, 2], "ends": {".": 7, "!": 3},
               "uh": 0.1, "sentences": (1, 3), "url": 0.03},
    "music": {"weights": [3, 2, 2, 1, 2, 2, 1, 3, 4, 2, 4, 1, 3, 1, 1, 1, 1, 2], "ends": {".": 6, "!": 3, "...": 1},
              "uh": 0.15, "sentences": (1, 3), "url": 0.04},
}

NAMED = ["askscience", "gaming", "politics", "worldnews"]
MEMBERS = ["funny", "movies", "music"]


def pick(rng, community, tag):
    topic = TOPICS.get(community, {}).get(tag)
    if topic and rng.random() < 0.6:
        return rng.choice(topic)
    return rng.choice(SHARED[tag])


def sentence(rng, community, template=None):
    """Returns (tokens, tags) in tokenized lowercase form."""
    style = STYLES[community]
    if template is None:
        template = rng.choices(TEMPLATES, weights=style["weights"])[0]
    toks, tags = [], []
    if rng.random() < style["uh"] and not template.startswith("UH"):
        toks += [rng.choice(SHARED["UH"]), ","]
        tags += ["UH", "PUNCT"]
    items = template.split()
    for item in items:
        if "/" in item:
            w, t = item.split("/")
            toks.append(w)
            tags.append(t)
        elif item == ",":
            toks.append(",")
            tags.append("PUNCT")
        elif item == "?":
            toks.append("?")
            tags.append(".")
        else:
            toks.append(pick(rng, community, item))
            tags.append(item)
    if items[-1] != "?":
        ends = style["ends"]
        toks.append(rng.choices(list(ends), weights=list(ends.values()))[0])
        tags.append(".")
    return toks, tags


def render(tokens):
    """Surface text whose tokenization is exactly `tokens`."""
    out = ""
    for i, t in enumerate(tokens):
        attach = i > 0 and (t in {",", ".", "!", "!!", "?", "..."} or t in {"n't", "'s"})
        if i > 0 and not attach:
            out += " "
        out += t
    return out[:1].upper() + out[1:]


def body(rng, community):
    lo, hi = STYLES[community]["sentences"]
    parts = [render(sentence(rng, community)[0]) for _ in range(rng.randint(lo, hi))]
    if rng.random() < STYLES[community]["url"]:
        parts.append("See http://example.com/%s/%d" % (community, rng.randint(1, 999)))
    return " ".join(parts)


def karma(rng, skill):
    if rng.random() < 0.08:
        return rng.randint(-5, 0)
    return max(1, int(rng.lognormvariate(1.0 + skill, 1.0)))


def generate(out_dir, seed, threads_per_community, small_threads):
    rng = random.Random(seed)
    communities = NAMED + MEMBERS
    crossover = ["power_user_%d" % i for i in range(12)]
    comments, posts = [], []
    cid = 0
    for ci, community in enumerate(communities):
        locals_ = ["%s_user_%d" % (community, i) for i in range(40)]
        for ti in range(threads_per_community + small_threads):
            pid = "%s%04d" % (community[:2], ti)
            base = 1420070400 + ci * 10_000_000 + ti * 5000
            title = render(sentence(rng, community)[0])
            selftext = body(rng, community) if rng.random() < 0.5 else ""
            posts.append({"id": pid, "subreddit": community, "author": rng.choice(locals_), "title": title,
                          "selftext": selftext, "score": max(1, int(rng.lognormvariate(3, 1.2))),
                          "created_utc": base})
            n = rng.randint(5, 12) if ti >= threads_per_community else rng.randint(22, 36)
            t = base
            for k in range(n):
                t += rng.choice([0, 7, 30, 90])
                cid += 1
                power = rng.random() < 0.3
                author = rng.choice(crossover) if power else rng.choice(locals_)
                skill = 1.5 if author.startswith("power_user") and int(author.split("_")[-1]) < 4 else 0.0
                text = body(rng, community)
                r = rng.random()
                if r < 0.01:
                    text = "[deleted]"
                elif r < 0.015:
                    text = "[removed]"
                comments.append({"id": "c%06d" % cid, "parent_id": "t3_" + pid, "link_id": "t3_" + pid,
                                 "subreddit": community, "author": author, "body": text,
                                 "score": karma(rng, skill), "created_utc": t})
    for k in range(5):
        cid += 1
        comments.append({"id": "c%06d" % cid, "parent_id": "t3_gone%d" % k, "link_id": "t3_gone%d" % k,
                         "subreddit": NAMED[k % len(NAMED)], "author": "drifter", "body": "Orphaned reply.",
                         "score": 1, "created_utc": 1420070400})
    rng.shuffle(comments)
    rng.shuffle(posts)

    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "comments.jsonl"), "w") as f:
        for i, c in enumerate(comments):
            line = json.dumps(c, separators=(",", ":"))
            if i % 1500 == 7:
                line = line[: len(line) // 2]  # truncated record
            f.write(line + "\n")
    with open(os.path.join(out_dir, "posts.jsonl"), "w") as f:
        for p in posts:
            f.write(json.dumps(p, separators=(",", ":")) + "\n")

    with open(os.path.join(out_dir, "tagged_train.txt"), "w") as f:
        fixed = [
            (["the", "cat", "sat", "."], ["DT", "NN", "VBD", "."]),
            (["a", "man", "saw", "the", "cat", "."], ["DT", "NN", "VBD", "DT", "NN", "."]),
        ]
        for toks, tags in fixed * 20:
            f.write(" ".join("%s_%s" % p for p in zip(toks, tags)) + "\n\n")
        for i in range(3000):
            toks, tags = sentence(rng, communities[i % len(communities)])
            f.write(" ".join("%s_%s" % p for p in zip(toks, tags)) + "\n\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data", "fixture"))
    ap.add_argument("--seed", type=int, default=20150101)
    ap.add_argument("--threads", type=int, default=22)
    ap.add_argument("--small-threads", type=int, default=3)
    args = ap.parse_args()
    generate(args.out, args.seed, args.threads, args.small_threads)


if __name__ == "__main__":
    main()
