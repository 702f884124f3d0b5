#!/usr/bin/env python3
"""Regenerates the bundled synthetic corpora under data/.

Two artifacts, both deterministic:
  data/synthetic_sentences.txt  2000 pre-tokenized training sentences.
      Four disjoint context families: pets (cat/dog interchangeable),
      hardware (bolt/nut interchangeable), and the three comment topics.
  data/synthetic_comments.csv   60 survey comments over three planted
      topics. The planted label is the id prefix: fb (12), wl (24), of (24).

The topic vocabularies share no content words, so trained vectors separate
the topics cleanly; all connective tissue comes from the stopword list and
is removed during preprocessing.
"""

import csv
import random

SEED = 20240601

PET_SUBJECTS = ["cat", "dog"]
PET_CONTEXT = ["chased", "ball", "garden", "leash", "played", "park", "vet",
               "treats", "furry", "tail"]
TOOL_SUBJECTS = ["bolt", "nut"]
TOOL_CONTEXT = ["wrench", "toolbox", "steel", "thread", "socket", "tightened",
                "workbench", "rusty", "spanner", "grease"]

FEEDBACK = ["feedback", "manager", "review", "performance", "appraisal",
            "response", "listens", "suggestions", "recognition", "praise",
            "evaluation", "criticism", "acknowledged", "improvement",
            "coaching", "mentoring", "transparency", "clarity"]
WORKLIFE = ["work-life", "balance", "hours", "flexible", "schedule",
            "overtime", "remote", "family", "weekend", "vacation",
            "commute", "leave", "wellness", "workload", "evenings",
            "holidays", "shifts", "rest"]
OFFICE = ["office", "environment", "team", "members", "conversation",
          "culture", "desk", "space", "noise", "meetings", "lighting",
          "cafeteria", "seating", "atmosphere", "colleagues", "workspace",
          "collaboration", "facilities"]

# Connectives for the comment texts, drawn from the bundled stopword list
# only; they vanish during preprocessing and never contaminate the topic
# vocabularies.
FILLER = ["the", "a", "my", "we", "our", "is", "and", "for", "with", "very",
          "so", "more", "do", "have", "all"]


def subject_sentence(rng, subjects, context):
    # Content words only: the analysis pipeline strips stopwords before
    # vectors are formed, so the training text carries none either.
    words = rng.sample(context, rng.randint(4, 6))
    words.insert(rng.randint(1, len(words) - 1), rng.choice(subjects))
    return " ".join(words)


def topic_sentence(rng, vocab, core):
    words = list(core) + rng.sample([w for w in vocab if w not in core],
                                    rng.randint(2, 4))
    rng.shuffle(words)
    return " ".join(words)


def make_sentences(rng):
    sentences = []
    for _ in range(250):
        sentences.append(subject_sentence(rng, PET_SUBJECTS, PET_CONTEXT))
        sentences.append(subject_sentence(rng, PET_SUBJECTS, PET_CONTEXT))
        sentences.append(subject_sentence(rng, TOOL_SUBJECTS, TOOL_CONTEXT))
    for _ in range(400):
        sentences.append(topic_sentence(rng, FEEDBACK, ["feedback"]))
    for _ in range(425):
        sentences.append(topic_sentence(rng, WORKLIFE, ["work-life", "balance"]))
    for _ in range(425):
        sentences.append(topic_sentence(rng, OFFICE, ["office", "environment"]))
    rng.shuffle(sentences)
    assert len(sentences) == 2000
    return sentences


def comment_text(rng, vocab, core_phrase):
    extra = rng.sample([w for w in vocab if w not in core_phrase],
                       rng.randint(3, 5))
    words = list(core_phrase) + extra
    # keep the core phrase adjacent, shuffle the rest around it
    head = words[: len(core_phrase)]
    tail = words[len(core_phrase):]
    rng.shuffle(tail)
    cut = rng.randint(0, len(tail))
    assembled = tail[:cut] + head + tail[cut:]
    for f in rng.sample(FILLER, rng.randint(2, 3)):
        assembled.insert(rng.randint(0, len(assembled)), f)
    text = " ".join(assembled)
    text = text[0].upper() + text[1:]
    ending = rng.choice([".", "!", "!!", "...", " in 2021.", "?"])
    return text + ending


def make_comments(rng):
    rows = []
    for i in range(12):
        rows.append(("fb%02d" % (i + 1),
                     comment_text(rng, FEEDBACK, ["feedback"])))
    for i in range(24):
        rows.append(("wl%02d" % (i + 1),
                     comment_text(rng, WORKLIFE, ["work-life", "balance"])))
    for i in range(24):
        rows.append(("of%02d" % (i + 1),
                     comment_text(rng, OFFICE, ["office", "environment"])))
    rng.shuffle(rows)
    return rows


def main():
    rng = random.Random(SEED)
    with open("data/synthetic_sentences.txt", "w", encoding="utf-8") as f:
        for s in make_sentences(rng):
            f.write(s + "\n")
    with open("data/synthetic_comments.csv", "w", encoding="utf-8",
              newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id", "text"])
        w.writerows(make_comments(rng))
    print("wrote data/synthetic_sentences.txt and data/synthetic_comments.csv")


if __name__ == "__main__":
    main()
