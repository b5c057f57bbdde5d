def add_point(score):
    score = score + 1
print(add_point(3))
