def vowel_total(word):
    count = 0
    for letter in word:
        if letter in 'aeiou':
            count = count + 1
    return count
print(vowel_total('summer'))
