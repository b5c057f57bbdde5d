def check_even(number):
    if number % 2 == 0:
        return True
    else:
        return False
print(check_even(12))
