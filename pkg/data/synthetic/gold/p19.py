for n in range(1, 21):
    if n % 3 == 0:
        print('fizz')
    else:
        print(n)
