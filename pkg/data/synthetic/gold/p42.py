for n in range(1, 16):
    if n % 5 == 0:
        print('buzz')
    else:
        print(n)
