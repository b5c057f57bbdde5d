squares = []
for i in range(4):
    squares.append(i * i)
print(squares)
