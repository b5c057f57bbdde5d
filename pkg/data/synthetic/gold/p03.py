def largest(values):
    best = values[0]
    for x in values:
        if x > best:
            best = x
    return best
print(largest([3, 9, 4]))
