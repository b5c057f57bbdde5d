def flip_text(text):
    result = ''
    for ch in text:
        result = ch + result
    return result
print(flip_text('stream'))
