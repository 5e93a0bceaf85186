#!/usr/bin/env python3
"""Regenerates toy_corpus.tsv: short caption-like sentences grouped by topic.

The output is checked in; the toy backend reads the checked-in file, so this
script only needs to run when the corpus is intentionally changed.
"""
import random

TOPICS = {
    "animals": {
        "subj": ["dog", "cat", "horse", "bird", "cow", "sheep", "puppy", "kitten", "elephant", "giraffe", "zebra", "bear"],
        "verb": ["is sitting", "is running", "is standing", "is sleeping", "is eating", "is lying", "is walking", "is playing"],
        "place": ["on the grass", "in the field", "near the fence", "in the water", "under a tree", "on the couch", "in the snow", "by the barn"],
        "adj": ["small", "large", "brown", "black", "white", "young", "fluffy", "spotted"],
        "obj": ["a ball", "a frisbee", "some hay", "a stick", "its food", "the leaves"],
    },
    "vehicles": {
        "subj": ["car", "bus", "truck", "train", "motorcycle", "bicycle", "boat", "airplane", "taxi", "van"],
        "verb": ["is parked", "is driving", "is stopped", "is moving", "is waiting", "is turning"],
        "place": ["on the street", "at the station", "near the curb", "on the highway", "in the parking lot", "on the tracks", "at the airport", "by the dock"],
        "adj": ["red", "blue", "old", "new", "yellow", "white", "double decker", "parked"],
        "obj": ["passengers", "a load of boxes", "two people", "its lights on", "a trailer"],
    },
    "food": {
        "subj": ["pizza", "sandwich", "salad", "cake", "bowl", "plate", "donut", "banana", "hot dog", "burger"],
        "verb": ["is sitting", "is served", "is placed", "is topped", "is cut", "is covered"],
        "place": ["on a table", "on a plate", "in a box", "on the counter", "in a bowl", "on a tray", "next to a cup", "in the kitchen"],
        "adj": ["fresh", "large", "small", "sliced", "delicious", "half eaten", "cheesy", "green"],
        "obj": ["cheese", "vegetables", "sauce", "fruit", "frosting", "meat"],
    },
    "sports": {
        "subj": ["man", "woman", "player", "boy", "girl", "skier", "surfer", "skateboarder", "batter", "tennis player"],
        "verb": ["is swinging", "is riding", "is throwing", "is holding", "is jumping", "is catching"],
        "place": ["on the court", "on a wave", "down the slope", "at the park", "on the field", "in the air", "on a ramp", "at home plate"],
        "adj": ["young", "professional", "tall", "happy", "skilled", "focused", "old", "little"],
        "obj": ["a racket", "a bat", "a surfboard", "a skateboard", "a ball", "skis"],
    },
    "kitchen": {
        "subj": ["kitchen", "stove", "refrigerator", "sink", "oven", "microwave", "counter", "table", "cabinet", "room"],
        "verb": ["is shown", "is filled", "is clean", "is empty", "is cluttered", "is lit"],
        "place": ["with white cabinets", "next to a window", "in a house", "with wooden floors", "under the lights", "near the door", "with a tile floor", "in an apartment"],
        "adj": ["small", "modern", "clean", "white", "wooden", "large", "old", "bright"],
        "obj": ["pots", "dishes", "a kettle", "appliances", "utensils", "bottles"],
    },
}

TEMPLATES = [
    "a {adj} {subj} {verb} {place}",
    "the {subj} {verb} {place}",
    "a {subj} {verb} {place} with {obj}",
    "two {subj}s are {verbp} {place}",
    "a {adj} {subj} with {obj} {place}",
    "there is a {adj} {subj} {place}",
    "a {subj} {verb} next to another {subj}",
    "an image of a {adj} {subj} {place}",
]


def plural_verb(verb):
    return verb.split(" ", 1)[1]


def main():
    rng = random.Random(20221018)
    lines = []
    for topic, words in TOPICS.items():
        seen = set()
        while len(seen) < 100:
            tpl = rng.choice(TEMPLATES)
            verb = rng.choice(words["verb"])
            s = tpl.format(
                adj=rng.choice(words["adj"]),
                subj=rng.choice(words["subj"]),
                verb=verb,
                verbp=plural_verb(verb),
                place=rng.choice(words["place"]),
                obj=rng.choice(words["obj"]),
            )
            s = s.replace("a a", "an a").replace("a e", "an e").replace("a o", "an o")
            if s not in seen:
                seen.add(s)
                lines.append(f"{topic}\t{s} .")
    with open("toy_corpus.tsv", "w") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
