def mean_of(numbers):
    total = 0
    for value in numbers:
        total = total + value
    return total / len(numbers)
print(mean_of([2, 4, 6]))
