def add_up_to(n):
    result = 0
    for i in range(1, n + 1):
        result = result + i
    return result
print(add_up_to(9))
