squares = []
for i in range(7):
    squares.append(i * i)
print(squares)
