def keep_positive(values):
    kept = []
    for v in values:
        if v < 0:
            break
        kept.append(v)
    return kept
print(keep_positive([4, -2, 7]))
