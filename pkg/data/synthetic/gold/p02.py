def is_even(value):
    if value % 2 == 0:
        return True
    else:
        return False
print(is_even(7))
