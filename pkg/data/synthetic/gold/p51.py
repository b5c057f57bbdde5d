def grade(score):
    result = 'C'
    if score >= 90:
        result = 'A'
    if score >= 80:
        result = 'B'
    return result
print(grade(95))
