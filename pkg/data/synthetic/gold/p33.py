def reverse(text):
    result = ''
    for ch in text:
        result = ch + result
    return result
print(reverse('stream'))
