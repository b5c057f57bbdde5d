def count_longs(words):
    for w in words:
        count = 0
        if len(w) > 4:
            count = count + 1
    return count
print(count_longs(['apple', 'fig', 'banana']))
