"""Writes hand_counted.tsv: ten texts with their counts and formula values.

Word, sentence and syllable counts are by hand. Letters and long words
(more than 6 letters) are tallied per word below so the arithmetic is visible.
"""

texts = [
    ("The cat sat.", 1, [("The", 1), ("cat", 1), ("sat", 1)]),
    ("The cat ate a banana.", 1, [("The", 1), ("cat", 1), ("ate", 1), ("a", 1), ("banana", 3)]),
    ("Children need school. The teacher reads.", 2,
     [("Children", 2), ("need", 1), ("school", 1), ("The", 1), ("teacher", 2), ("reads", 1)]),
    ("Several important people understand the information.", 1,
     [("Several", 3), ("important", 3), ("people", 2), ("understand", 3), ("the", 1), ("information", 4)]),
    ("The university government wanted education.", 1,
     [("The", 1), ("university", 5), ("government", 3), ("wanted", 2), ("education", 4)]),
    ("A happy family used a little table.", 1,
     [("A", 1), ("happy", 2), ("family", 3), ("used", 1), ("a", 1), ("little", 2), ("table", 2)]),
    ("Yesterday the elephant wanted water.", 1,
     [("Yesterday", 3), ("the", 1), ("elephant", 3), ("wanted", 2), ("water", 2)]),
    ("Communication is important. Reading is simple.", 2,
     [("Communication", 5), ("is", 1), ("important", 3), ("Reading", 2), ("is", 1), ("simple", 2)]),
    ("People make boxes. Children want places. The computer used language.", 3,
     [("People", 2), ("make", 1), ("boxes", 2), ("Children", 2), ("want", 1), ("places", 2), ("The", 1),
      ("computer", 3), ("used", 1), ("language", 2)]),
    ("Through history, the family thought of independence!", 1,
     [("Through", 1), ("history", 3), ("the", 1), ("family", 3), ("thought", 1), ("of", 1), ("independence", 4)]),
]

print("# text\twords\tsentences\tsyllables\tletters\tlong_words\tFKGL\tARI\tLIX\tFRE_EN")
for text, s, words in texts:
    w = len(words)
    syl = sum(n for _, n in words)
    letters = sum(len(word) for word, _ in words)
    long_words = sum(1 for word, _ in words if len(word) > 6)
    fkgl = 0.39 * (w / s) + 11.8 * (syl / w) - 15.59
    ari = 4.71 * (letters / w) + 0.5 * (w / s) - 21.43
    lix = w / s + 100 * long_words / w
    fre = 206.835 - 1.015 * (w / s) - 84.6 * (syl / w)
    print("\t".join([text, str(w), str(s), str(syl), str(letters), str(long_words)] +
                    [repr(v) for v in (fkgl, ari, lix, fre)]))
