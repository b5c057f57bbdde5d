def letter_for(score):
    if score >= 92:
        return 'A'
    elif score >= 75:
        return 'B'
    else:
        return 'C'
print(letter_for(78))
