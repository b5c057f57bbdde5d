def check_even(value):
    if value % 2 == 0:
        return True
    else:
        return False
print(check_even(12))
