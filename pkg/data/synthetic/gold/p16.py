def grade(score):
    if score >= 85:
        return 'A'
    elif score >= 70:
        return 'B'
    else:
        return 'C'
print(grade(80))
