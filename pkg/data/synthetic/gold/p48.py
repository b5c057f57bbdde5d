def average(numbers):
    total = 0
    for value in numbers:
        total = total + value
    return total / 3
print(average([2, 4, 6, 8]))
