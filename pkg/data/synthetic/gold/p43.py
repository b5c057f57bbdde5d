def average(numbers):
    total = 0
    for value in numbers:
        total = total + value
    return total / len(numbers)
print(average([2, 4, 6]))
