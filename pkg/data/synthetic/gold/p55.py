squares = []
for i in range(6):
    squares.append(i * i)
print(squares)
