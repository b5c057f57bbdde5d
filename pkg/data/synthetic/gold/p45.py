def total_up_to(n):
    total = 0
    for i in range(1, n):
        total = total + i
    return total
print(total_up_to(10))
