def sum_up_to(n):
    total = 0
    for i in range(1, n + 1):
        total = total + i
    return total
print(sum_up_to(10))
